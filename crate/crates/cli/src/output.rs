//! JSON and CSV emission with fixed float formatting.
//!
//! Floats are written with 17 significant digits in scientific notation,
//! object keys are sorted and non-finite values become `null`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// Non-finite values map to `null`.
pub fn num(x: f64) -> Value {
    Value::from(x)
}

struct Fixed<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json_string(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed(PrettyFormatter::new()));
    serde::Serialize::serialize(value, &mut ser).expect("serializing a Value cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Output directory; created on first write.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    fn target(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.root)
            .with_context(|| format!("cannot create output directory {}", self.root.display()))?;
        Ok(self.root.join(name))
    }

    pub fn write_json(&self, name: &str, value: &Value) -> Result<()> {
        let path = self.target(name)?;
        fs::write(&path, to_json_string(value)).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.target(name)?;
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits_and_keys_are_sorted() {
        let v = json!({"b": 0.1, "a": [1, 2.5], "c": num(f64::NAN)});
        let s = to_json_string(&v);
        let a = s.find("\"a\"").unwrap();
        let b = s.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("2.5000000000000000e0"));
        assert!(s.contains("\"c\": null"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
        assert_eq!(back["a"][0].as_u64(), Some(1));
    }

    #[test]
    fn csv_floats_round_trip() {
        for x in [1.0 / 3.0, 1e-300, -7.25, std::f64::consts::PI] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "");
    }
}
