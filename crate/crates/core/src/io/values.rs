//! Field-level helpers shared by the ARFF and CSV readers and writers.

use crate::data::{Attribute, AttributeKind, DatasetSchema, LabeledInstance, Value};

/// Decimal literal with optional sign, fraction and exponent. `inf`, `nan`
/// and hexadecimal forms are rejected; `.` is the only radix character.
pub fn parse_number(s: &str) -> Option<f64> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Types one trimmed field against its attribute.
pub fn parse_field(field: &str, attr: &Attribute) -> Result<Value, String> {
    if field == "?" {
        return Ok(Value::Missing);
    }
    match &attr.kind {
        AttributeKind::Numeric => parse_number(field).map(Value::Numeric).ok_or_else(|| {
            format!(
                "attribute '{}': '{}' is not a number",
                attr.name,
                clip(field)
            )
        }),
        AttributeKind::Nominal(values) => {
            let v = unquote(field);
            values
                .iter()
                .position(|d| *d == v)
                .map(|i| Value::Nominal(i as u32))
                .ok_or_else(|| {
                    format!("attribute '{}': undeclared value '{}'", attr.name, clip(&v))
                })
        }
    }
}

fn clip(s: &str) -> &str {
    match s.char_indices().nth(32) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// Splits on commas outside single or double quotes. Quotes are kept in the
/// returned slices.
pub fn split_fields(line: &str) -> Result<Vec<&str>, String> {
    let mut fields = Vec::new();
    let mut start = 0;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match (quote, c) {
            (Some(_), '\\') => escaped = true,
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '\'' | '"') => quote = Some(c),
            (None, ',') => {
                fields.push(line[start..i].trim());
                start = i + 1;
            }
            (None, _) => {}
        }
    }
    if quote.is_some() {
        return Err("unterminated quote".to_string());
    }
    let last = line[start..].trim();
    if !(fields.is_empty() && last.is_empty()) {
        fields.push(last);
    }
    Ok(fields)
}

/// Strips matching outer quotes and resolves backslash escapes.
pub fn unquote(s: &str) -> String {
    let b = s.as_bytes();
    if b.len() >= 2 && (b[0] == b'\'' || b[0] == b'"') && b[b.len() - 1] == b[0] {
        let inner = &s[1..s.len() - 1];
        let mut out = String::with_capacity(inner.len());
        let mut chars = inner.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                if let Some(n) = chars.next() {
                    out.push(n);
                }
            } else {
                out.push(c);
            }
        }
        out
    } else {
        s.to_string()
    }
}

pub fn needs_quoting(s: &str) -> bool {
    s.is_empty()
        || s == "?"
        || s.starts_with('%')
        || s.starts_with('@')
        || s.chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '\'' | '"' | '{' | '}' | '\\' | '%'))
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

/// Renders one instance in attribute order, class included.
pub fn format_row(inst: &LabeledInstance, schema: &DatasetSchema, sep: &str) -> String {
    let mut features = inst.instance.values.iter();
    let fields: Vec<String> = schema
        .attributes
        .iter()
        .enumerate()
        .map(|(j, attr)| {
            let v = if j == schema.class_index {
                Value::Nominal(inst.label.0)
            } else {
                *features.next().expect("arity checked on parse")
            };
            match (v, &attr.kind) {
                (Value::Missing, _) => "?".to_string(),
                (Value::Numeric(x), _) => format!("{x:?}"),
                (Value::Nominal(i), AttributeKind::Nominal(values)) => {
                    let s = &values[i as usize];
                    if needs_quoting(s) {
                        quote(s)
                    } else {
                        s.clone()
                    }
                }
                (Value::Nominal(i), AttributeKind::Numeric) => i.to_string(),
            }
        })
        .collect();
    fields.join(sep)
}
