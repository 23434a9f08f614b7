//! Locale-independent number formatting for CSV and reports.

/// Twelve significant digits in scientific notation, `.` decimal point.
/// Negative zero prints as zero so repeated runs are byte-identical.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Writes a header and rows with the `csv` crate into a string.
pub fn csv_string<I, R>(header: &[&str], rows: I) -> crate::Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| crate::Error::Io(e.to_string()))
}
