//! Machine-readable output: JSON records with 17-significant-digit floats and
//! the flat CSV table. Identical inputs always serialize to identical bytes.

use std::io::{self, Write};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// An order-preserving JSON-like value tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    UInt(u64),
    Num(f64),
    Text(String),
    List(Vec<Value>),
    Map(Vec<(String, Value)>),
}

impl Value {
    pub fn map(entries: Vec<(&str, Value)>) -> Value {
        Value::Map(
            entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn nums(values: impl IntoIterator<Item = f64>) -> Value {
        Value::List(values.into_iter().map(Value::Num).collect())
    }

    pub fn uints(values: impl IntoIterator<Item = u64>) -> Value {
        Value::List(values.into_iter().map(Value::UInt).collect())
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Bool(b) => serializer.serialize_bool(*b),
            Value::UInt(u) => serializer.serialize_u64(*u),
            Value::Num(x) => {
                if x.is_finite() {
                    serializer.serialize_f64(*x)
                } else {
                    serializer.serialize_none()
                }
            }
            Value::Text(s) => serializer.serialize_str(s),
            Value::List(items) => {
                let mut seq = serializer.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Value::Map(entries) => {
                let mut map = serializer.serialize_map(Some(entries.len()))?;
                for (k, v) in entries {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

/// One emitted record: the command, an echo of its parameters, the numeric
/// results, the seed when the computation consumed randomness, and the tool
/// version.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
}

/// Formatter printing every float with 17 significant digits, enough to
/// round-trip any f64 exactly.
struct SciNotation;

impl serde_json::ser::Formatter for SciNotation {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json(record: &OutputRecord) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciNotation);
    record
        .serialize(&mut ser)
        .expect("output records contain only serializable values");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

/// One row of the flat CSV view:
/// `statistic,n,lambda,r,T,a,value,stderr,seed`.
#[derive(Debug, Clone, Default)]
pub struct CsvRow {
    pub statistic: String,
    pub n: Option<u64>,
    pub lambda: Option<f64>,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub a: Option<f64>,
    pub value: f64,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
}

fn push_opt_f64(out: &mut String, v: Option<f64>) {
    if let Some(x) = v {
        out.push_str(&format!("{x:.16e}"));
    }
    out.push(',');
}

pub fn to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from("statistic,n,lambda,r,T,a,value,stderr,seed\n");
    for row in rows {
        out.push_str(&row.statistic);
        out.push(',');
        if let Some(n) = row.n {
            out.push_str(&n.to_string());
        }
        out.push(',');
        push_opt_f64(&mut out, row.lambda);
        push_opt_f64(&mut out, row.r);
        push_opt_f64(&mut out, row.t);
        push_opt_f64(&mut out, row.a);
        out.push_str(&format!("{:.16e}", row.value));
        out.push(',');
        if let Some(se) = row.stderr {
            out.push_str(&format!("{se:.16e}"));
        }
        out.push(',');
        if let Some(seed) = row.seed {
            out.push_str(&seed.to_string());
        }
        out.push('\n');
    }
    out
}
