//! Float formatting shared by every text artifact (JSON and CSV).
//!
//! All floats are written with 17 significant digits so that a value read
//! back parses to the identical `f64`.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// Formats `x` with 17 significant digits in scientific notation.
///
/// Non-finite values are written as `NaN`, `inf` or `-inf`; they never occur
/// in JSON output because the constructors reject them.
pub fn f64_17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        format!("{}", x)
    }
}

/// JSON formatter that prints floats via [`f64_17`].
#[derive(Debug, Default, Clone, Copy)]
pub struct SigDigitsFormatter;

impl Formatter for SigDigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(f64_17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` to a JSON string with 17-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigDigitsFormatter);
    value.serialize(&mut ser)?;
    // serde_json only ever emits UTF-8
    Ok(String::from_utf8(buf).expect("json output is utf-8"))
}
