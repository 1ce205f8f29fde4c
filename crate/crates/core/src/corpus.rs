//! Plain-text order corpora.
//!
//! One order per line, whitespace separated:
//!
//! ```text
//! a b den n00 n01 n02 n03 n10 ... n33 [label]
//! ```
//!
//! The order lives in `(a, b | Q)` with basis vectors `(n_r0 + n_r1 i + n_r2 j + n_r3 k) / den`
//! for `r = 0..3`. The label is the rest of the line. Blank lines and lines starting
//! with `#` are ignored.

use std::sync::Arc;

use crate::numthy::Rat;
use crate::quat::{order_closure_check, QuatLattice, QuatOrder, RatQuatAlgebra};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub label: String,
    pub order: Arc<QuatOrder>,
}

pub fn parse_line(line: &str) -> Result<Option<CorpusEntry>> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 19 {
        return Err(Error::InvalidInput(format!("expected at least 19 fields, got {}: {line}", fields.len())));
    }
    let nums = fields[..19]
        .iter()
        .map(|f| f.parse::<i128>().map_err(|e| Error::InvalidInput(format!("bad integer {f:?}: {e}"))))
        .collect::<Result<Vec<i128>>>()?;
    let (a, b, den) = (nums[0], nums[1], nums[2]);
    if a == 0 || b == 0 || den <= 0 {
        return Err(Error::InvalidInput(format!("need a, b nonzero and den > 0: {line}")));
    }
    let alg = Arc::new(RatQuatAlgebra::new(a, b));
    let rows: Vec<[Rat; 4]> = (0..4).map(|r| std::array::from_fn(|c| Rat::new(nums[3 + 4 * r + c], den))).collect();
    let lat = QuatLattice::from_generators(&rows).ok_or_else(|| Error::InvalidInput("basis has rank < 4".into()))?;
    let order = order_closure_check(alg, lat)?;
    let label = fields[19..].join(" ");
    Ok(Some(CorpusEntry { label, order: Arc::new(order) }))
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| parse_line(l).map_err(|e| Error::InvalidInput(format!("line {}: {e}", i + 1))).transpose())
        .collect()
}

/// The corpus line for an order.
pub fn format_entry(order: &QuatOrder, label: &str) -> String {
    let lat = &order.lat;
    let mut fields = vec![order.alg.a.to_string(), order.alg.b.to_string(), lat.den.to_string()];
    fields.extend(lat.rows.iter().flat_map(|r| r.iter().map(|x| x.to_string())));
    if !label.is_empty() {
        fields.push(label.to_string());
    }
    fields.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::eichler_order;

    #[test]
    fn round_trip() {
        let alg = Arc::new(RatQuatAlgebra::new(-1, -3));
        let o = eichler_order(alg, 4, 3).unwrap();
        let line = format_entry(&o, "level 4 in D3");
        let text = format!("# comment\n\n{line}\n");
        let parsed = parse_corpus(&text).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].label, "level 4 in D3");
        assert_eq!(parsed[0].order.lat, o.lat);
        assert_eq!(parsed[0].order.disc, o.disc);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_corpus("-1 -1 1 1 0 0 0").is_err());
        // not closed under multiplication: Z + Z 2i + Z j + Z k
        assert!(parse_corpus("-1 -1 1 1 0 0 0 0 2 0 0 0 0 1 0 0 0 0 1").is_err());
        assert!(parse_corpus("-1 -1 1 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 x").is_err());
    }
}
