use std::fmt::Write as _;

use num_complex::Complex64;

/// Real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text built in memory: `#` comment lines, a header, then rows.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, line: impl AsRef<str>) {
        for l in line.as_ref().lines() {
            let _ = writeln!(self.text, "# {l}");
        }
    }

    pub fn header(&mut self, columns: &[&str]) {
        self.columns = columns.len();
        let _ = writeln!(self.text, "{}", columns.join(","));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns);
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn push_raw(&mut self, body: &str) {
        self.text.push_str(body);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub fn complex(z: Complex64) -> [String; 2] {
    [real(z.re), real(z.im)]
}
