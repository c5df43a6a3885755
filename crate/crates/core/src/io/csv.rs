//! CSV streams typed against an externally supplied schema.

use crate::data::{Dataset, DatasetSchema};
use crate::error::{Error, Result};
use crate::io::arff::parse_row;
use crate::io::values::format_row;

/// Parses CSV rows in schema attribute order (class column included).
/// Fields may be double-quoted; `?` marks a missing value.
pub fn parse_csv(text: &str, schema: &DatasetSchema, has_header: bool) -> Result<Dataset> {
    parse_csv_bytes(text.as_bytes(), schema, has_header)
}

pub fn parse_csv_bytes(bytes: &[u8], schema: &DatasetSchema, has_header: bool) -> Result<Dataset> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(::csv::Trim::All)
        .comment(None)
        .from_reader(bytes);
    if has_header {
        let headers = reader.headers().map_err(|e| csv_error(&e, 1))?;
        if headers.len() != schema.attributes.len() {
            return Err(Error::parse(
                1,
                format!(
                    "header has {} columns, schema declares {}",
                    headers.len(),
                    schema.attributes.len()
                ),
            ));
        }
    }
    let mut instances = Vec::new();
    let mut record = ::csv::StringRecord::new();
    loop {
        let line = reader.position().line() as usize;
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(&e, line)),
        }
        let line = record.position().map_or(line, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let fields: Vec<&str> = record.iter().collect();
        instances.push(parse_row(&fields, schema, line)?);
    }
    Ok(Dataset {
        schema: schema.clone(),
        instances,
    })
}

fn csv_error(e: &::csv::Error, fallback: usize) -> Error {
    let line = e.position().map_or(fallback, |p| p.line() as usize);
    let message = match e.kind() {
        ::csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
        _ => e.to_string(),
    };
    Error::parse(line.max(1), message)
}

/// Serializes instances as CSV, optionally preceded by a header of
/// attribute names.
pub fn write_csv(data: &Dataset, header: bool) -> String {
    let mut out = String::new();
    if header {
        let names: Vec<String> = data
            .schema
            .attributes
            .iter()
            .map(|a| csv_field(&a.name))
            .collect();
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for inst in &data.instances {
        let row = format_row(inst, &data.schema, "\u{1f}");
        let fields: Vec<String> = row.split('\u{1f}').map(csv_field).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    // ARFF-style quoting from format_row is undone first; CSV uses "" escapes.
    let raw = crate::io::values::unquote(s);
    if raw.is_empty() || raw.contains([',', '"', '\n', '\r']) || raw != raw.trim() {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, ClassLabel, Value};

    fn schema() -> DatasetSchema {
        DatasetSchema::new(
            "t",
            vec![
                Attribute::numeric("x"),
                Attribute::nominal("colour", ["red", "green"]),
                Attribute::nominal("class", ["no", "yes"]),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn headered_and_headerless() {
        let with = parse_csv("x,colour,class\n1.5,red,yes\n2,green,no\n", &schema(), true).unwrap();
        let without = parse_csv("1.5,red,yes\n2,green,no\n", &schema(), false).unwrap();
        assert_eq!(with, without);
        assert_eq!(with.len(), 2);
        assert_eq!(with.instances[0].label, ClassLabel(1));
    }

    #[test]
    fn missing_value() {
        let d = parse_csv("?,red,yes\n", &schema(), false).unwrap();
        assert_eq!(d.instances[0].instance.values[0], Value::Missing);
    }

    #[test]
    fn roundtrip() {
        let d = parse_csv("1.5,red,yes\n-0.25,?,no\n", &schema(), false).unwrap();
        for header in [true, false] {
            assert_eq!(
                parse_csv(&write_csv(&d, header), &schema(), header).unwrap(),
                d
            );
        }
    }

    #[test]
    fn errors_are_positioned() {
        assert!(matches!(
            parse_csv("1,red,yes\n1,blue,no\n", &schema(), false),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("1,red\n", &schema(), false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_csv("a,b\n1,red,yes\n", &schema(), true),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_csv_bytes(b"1,r\xffed,yes\n", &schema(), false).is_err());
    }
}
