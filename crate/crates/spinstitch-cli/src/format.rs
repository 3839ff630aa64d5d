//! Locale-free number and table formatting.
//!
//! Every float in a CSV goes through [`sig10`], which keeps 10 significant
//! digits and drops trailing zeros, switching to scientific notation
//! outside the comfortable fixed-point window. The format depends only on
//! the value, never on environment or locale, which is what makes repeat
//! runs byte-identical.

/// 10-significant-digit rendering with a plain `.` separator.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    // Round once in scientific form to learn the decimal exponent of the
    // rounded value, then choose the presentation from it.
    let sci = format!("{x:.9e}");
    let (mantissa, exponent) = sci.split_once('e').expect("{:.9e} always carries an exponent");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    if (-4..10).contains(&exponent) {
        let decimals = (9 - exponent).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A CSV table under construction: fixed header, LF line endings, all
/// floats through [`sig10`].
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Table { text: format!("{header}\n") }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let rendered: Vec<String> = cells.iter().map(Cell::render).collect();
        self.text.push_str(&rendered.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// One CSV cell; keeps integers and flags out of the float formatter.
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(&'static str),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => sig10(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.to_string(),
        }
    }
}
