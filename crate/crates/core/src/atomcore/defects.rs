use std::path::Path;

use crate::error::{Error, Result};

/// Rydberg-Ritz coefficients for one (l, j) channel.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DefectChannel {
    pub l: u32,
    /// Twice the total angular momentum.
    pub j2: u32,
    pub delta0: f64,
    pub delta2: f64,
    pub n_min: u32,
}

impl DefectChannel {
    pub fn delta(&self, n: u32) -> f64 {
        let x = n as f64 - self.delta0;
        self.delta0 + self.delta2 / (x * x)
    }
}

/// Quantum-defect table for one alkali species.
///
/// Channels absent from the table with `l` above the largest tabulated `l`
/// are hydrogenic (zero defect).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuantumDefectTable {
    pub species: String,
    pub channels: Vec<DefectChannel>,
}

const RB87_TABLE: &str = include_str!("../../data/rb87_defects.txt");

impl QuantumDefectTable {
    /// The bundled ⁸⁷Rb table.
    pub fn rb87() -> Self {
        Self::parse(RB87_TABLE).expect("bundled defect table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read defect table {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    /// Parse the plain-text format: one row per channel with columns
    /// `species l j delta0 delta2 n_min`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut species: Option<String> = None;
        let mut channels = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::config(format!("line {}: {what}: `{raw}`", lineno + 1));
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 6 {
                return Err(bad("expected 6 columns"));
            }
            match &species {
                None => species = Some(cols[0].to_string()),
                Some(s) if s != cols[0] => return Err(bad("mixed species in one table")),
                _ => {}
            }
            let l: u32 = cols[1].parse().map_err(|_| bad("invalid l"))?;
            let j2 = parse_half_integer(cols[2]).ok_or_else(|| bad("invalid j"))?;
            let delta0: f64 = cols[3].parse().map_err(|_| bad("invalid delta0"))?;
            let delta2: f64 = cols[4].parse().map_err(|_| bad("invalid delta2"))?;
            let n_min: u32 = cols[5].parse().map_err(|_| bad("invalid n_min"))?;
            if j2 % 2 != 1 || (j2 as i64 - 2 * l as i64).abs() != 1 {
                return Err(bad("j must equal l ± 1/2"));
            }
            if n_min <= l {
                return Err(bad("n_min must exceed l"));
            }
            if channels.iter().any(|c: &DefectChannel| c.l == l && c.j2 == j2) {
                return Err(bad("duplicate channel"));
            }
            channels.push(DefectChannel { l, j2, delta0, delta2, n_min });
        }
        let species = species.ok_or_else(|| Error::config("defect table has no rows"))?;
        let table = Self { species, channels };
        for c in &table.channels {
            if c.delta(c.n_min) < 0.0 {
                return Err(Error::config(format!(
                    "negative quantum defect for l={} j={}/2 at n_min",
                    c.l, c.j2
                )));
            }
        }
        Ok(table)
    }

    pub fn max_l(&self) -> u32 {
        self.channels.iter().map(|c| c.l).max().unwrap_or(0)
    }

    pub fn channel(&self, l: u32, j2: u32) -> Option<&DefectChannel> {
        self.channels.iter().find(|c| c.l == l && c.j2 == j2)
    }

    /// Quantum defect δ_{nlj}.
    pub fn delta(&self, n: u32, l: u32, j2: u32) -> Result<f64> {
        match self.channel(l, j2) {
            Some(c) => Ok(c.delta(n)),
            None if l > self.max_l() => Ok(0.0),
            None => Err(Error::InvalidChannel(format!(
                "no defect entry for l={l}, j={j2}/2 in {} table",
                self.species
            ))),
        }
    }

    /// Smallest allowed principal quantum number for the channel.
    pub fn n_min(&self, l: u32, j2: u32) -> u32 {
        self.channel(l, j2).map_or(l + 1, |c| c.n_min)
    }

    /// Largest n_min over the tabulated channels.
    pub fn max_n_min(&self) -> u32 {
        self.channels.iter().map(|c| c.n_min).max().unwrap_or(1)
    }
}

/// Parse `1/2`, `3/2`, `0.5`, `2` etc. into a doubled integer.
pub fn parse_half_integer(s: &str) -> Option<u32> {
    if let Some((a, b)) = s.split_once('/') {
        let a: u32 = a.trim().parse().ok()?;
        match b.trim() {
            "2" => Some(a),
            "1" => Some(2 * a),
            _ => None,
        }
    } else {
        let v: f64 = s.trim().parse().ok()?;
        let d = 2.0 * v;
        (d >= 0.0 && (d - d.round()).abs() < 1e-9).then_some(d.round() as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_parses() {
        let t = QuantumDefectTable::rb87();
        assert_eq!(t.species, "Rb87");
        assert_eq!(t.channels.len(), 7);
        assert_eq!(t.max_l(), 3);
        for c in &t.channels {
            for n in c.n_min..120 {
                assert!(c.delta(n) >= 0.0);
            }
        }
    }

    #[test]
    fn high_l_is_hydrogenic() {
        let t = QuantumDefectTable::rb87();
        assert_eq!(t.delta(30, 4, 9).unwrap(), 0.0);
        assert_eq!(t.delta(30, 17, 33).unwrap(), 0.0);
    }

    #[test]
    fn fine_structure_order() {
        let t = QuantumDefectTable::rb87();
        assert!(t.delta(50, 1, 1).unwrap() > t.delta(50, 1, 3).unwrap());
    }

    #[test]
    fn half_integer_parsing() {
        assert_eq!(parse_half_integer("1/2"), Some(1));
        assert_eq!(parse_half_integer("5/2"), Some(5));
        assert_eq!(parse_half_integer("0.5"), Some(1));
        assert_eq!(parse_half_integer("3"), Some(6));
        assert_eq!(parse_half_integer("0.3"), None);
    }

    #[test]
    fn rejects_malformed_rows() {
        let err = QuantumDefectTable::parse("Rb87 0 1/2 3.1\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        assert!(QuantumDefectTable::parse("Rb87 1 5/2 1 0 5\n").is_err());
        assert!(QuantumDefectTable::parse("# nothing\n").is_err());
    }
}
