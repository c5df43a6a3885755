//! ARFF subset: `@relation`, `@attribute` (numeric / real / integer /
//! nominal), `@data`, `%` comments and `?` for missing values. Keywords are
//! case-insensitive. Sparse rows, string and date attributes are rejected.

use std::fmt::Write as _;

use crate::data::{Attribute, AttributeKind, Dataset, DatasetSchema, Instance, LabeledInstance};
use crate::error::{Error, Result};
use crate::io::values::{needs_quoting, parse_field, quote, split_fields, unquote};

/// Which attribute carries the class label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum ClassSelector {
    /// The last declared attribute.
    #[default]
    Last,
    Name(String),
    Index(usize),
}

pub fn parse_arff(text: &str) -> Result<Dataset> {
    parse_arff_with(text, &ClassSelector::Last)
}

/// Parses raw bytes; invalid UTF-8 is reported with the offending line.
pub fn parse_arff_bytes(bytes: &[u8], class: &ClassSelector) -> Result<Dataset> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_arff_with(text, class),
        Err(e) => {
            let line = bytes[..e.valid_up_to()]
                .iter()
                .filter(|&&b| b == b'\n')
                .count()
                + 1;
            Err(Error::parse(line, "invalid UTF-8"))
        }
    }
}

fn keyword<'a>(line: &'a str, word: &str) -> Option<&'a str> {
    let head = line.get(..word.len())?;
    if !head.eq_ignore_ascii_case(word) {
        return None;
    }
    let rest = &line[word.len()..];
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

/// Splits a possibly quoted leading token from the rest of the line.
fn take_name(s: &str, line: usize) -> Result<(String, &str)> {
    let s = s.trim_start();
    let Some(first) = s.chars().next() else {
        return Err(Error::parse(line, "missing name"));
    };
    if first == '\'' || first == '"' {
        let mut escaped = false;
        for (i, c) in s.char_indices().skip(1) {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == first {
                return Ok((unquote(&s[..=i]), &s[i + 1..]));
            }
        }
        Err(Error::parse(line, "unterminated quoted name"))
    } else {
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        Ok((s[..end].to_string(), &s[end..]))
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let (name, ty) = take_name(rest, line)?;
    let ty = ty.trim();
    if ty.is_empty() {
        return Err(Error::parse(
            line,
            format!("attribute '{name}' has no type"),
        ));
    }
    if let Some(body) = ty.strip_prefix('{') {
        let Some(body) = body.strip_suffix('}') else {
            return Err(Error::parse(line, "unterminated nominal domain"));
        };
        let values = split_fields(body).map_err(|m| Error::parse(line, m))?;
        let values: Vec<String> = values.into_iter().map(|v| unquote(v.trim())).collect();
        if values.is_empty() || values.iter().any(String::is_empty) {
            return Err(Error::parse(
                line,
                format!("attribute '{name}' has an empty nominal value"),
            ));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::parse(
                    line,
                    format!("attribute '{name}' repeats value '{v}'"),
                ));
            }
        }
        return Ok(Attribute {
            name,
            kind: AttributeKind::Nominal(values),
        });
    }
    match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(Attribute::numeric(name)),
        other => Err(Error::parse(
            line,
            format!("unsupported attribute type '{other}'"),
        )),
    }
}

fn resolve_class(attributes: &[Attribute], selector: &ClassSelector, line: usize) -> Result<usize> {
    match selector {
        ClassSelector::Last => attributes
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::parse(line, "no class attribute: no attributes declared")),
        ClassSelector::Index(i) if *i < attributes.len() => Ok(*i),
        ClassSelector::Index(i) => Err(Error::parse(line, format!("class index {i} out of range"))),
        ClassSelector::Name(name) => attributes
            .iter()
            .position(|a| &a.name == name)
            .ok_or_else(|| Error::parse(line, format!("no class attribute named '{name}'"))),
    }
}

pub fn parse_arff_with(text: &str, class: &ClassSelector) -> Result<Dataset> {
    let mut relation: Option<String> = None;
    let mut attributes = Vec::new();
    let mut schema: Option<DatasetSchema> = None;
    let mut instances = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(schema) = &schema {
            if line.starts_with('{') {
                return Err(Error::parse(line_no, "sparse ARFF rows are not supported"));
            }
            let fields = split_fields(line).map_err(|m| Error::parse(line_no, m))?;
            instances.push(parse_row(&fields, schema, line_no)?);
            continue;
        }
        if let Some(rest) = keyword(line, "@relation") {
            let (name, _) = take_name(rest, line_no)?;
            relation = Some(name);
        } else if let Some(rest) = keyword(line, "@attribute") {
            attributes.push(parse_attribute(rest, line_no)?);
        } else if keyword(line, "@data").is_some() {
            let class_index = resolve_class(&attributes, class, line_no)?;
            let s = DatasetSchema::new(
                relation.clone().unwrap_or_default(),
                std::mem::take(&mut attributes),
                class_index,
            )
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
            schema = Some(s);
        } else {
            return Err(Error::parse(
                line_no,
                format!("unexpected header line '{}'", truncate(line)),
            ));
        }
    }
    let schema = schema.ok_or_else(|| Error::parse(last_line.max(1), "missing @data section"))?;
    Ok(Dataset { schema, instances })
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(40) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// Converts one row of raw fields (in attribute order, class included).
pub(crate) fn parse_row(
    fields: &[&str],
    schema: &DatasetSchema,
    line: usize,
) -> Result<LabeledInstance> {
    if fields.len() != schema.attributes.len() {
        return Err(Error::parse(
            line,
            format!(
                "expected {} values, found {}",
                schema.attributes.len(),
                fields.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(fields.len() - 1);
    let mut label = None;
    for (j, (field, attr)) in fields.iter().zip(&schema.attributes).enumerate() {
        let v = parse_field(field.trim(), attr).map_err(|m| Error::parse(line, m))?;
        if j == schema.class_index {
            match v {
                crate::data::Value::Nominal(c) => label = Some(crate::data::ClassLabel(c)),
                _ => return Err(Error::parse(line, "class value is missing")),
            }
        } else {
            values.push(v);
        }
    }
    Ok(LabeledInstance {
        instance: Instance::new(values),
        label: label.expect("class column visited"),
    })
}

/// Serializes a dataset as ARFF. Parsing the output yields an identical
/// dataset.
pub fn write_arff(data: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", quote_if_needed(&data.schema.relation));
    out.push('\n');
    for attr in &data.schema.attributes {
        let ty = match &attr.kind {
            AttributeKind::Numeric => "numeric".to_string(),
            AttributeKind::Nominal(values) => {
                let vs: Vec<String> = values.iter().map(|v| quote_if_needed(v)).collect();
                format!("{{{}}}", vs.join(","))
            }
        };
        let _ = writeln!(out, "@attribute {} {ty}", quote_if_needed(&attr.name));
    }
    out.push_str("\n@data\n");
    for inst in &data.instances {
        out.push_str(&crate::io::values::format_row(inst, &data.schema, ","));
        out.push('\n');
    }
    out
}

fn quote_if_needed(s: &str) -> String {
    if needs_quoting(s) {
        quote(s)
    } else {
        s.to_string()
    }
}
