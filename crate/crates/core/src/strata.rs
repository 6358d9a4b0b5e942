//! Dimension bookkeeping for the boundary divisor table.
//!
//! Rows are declared in `data/strata.toml`; every dimension is recomputed
//! here from the moduli dimension formulas and compared with the declared
//! values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TABLE: &str = include_str!("../data/strata.toml");

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(tag = "kind")]
pub enum Term {
    A {
        g: u32,
    },
    M {
        g: u32,
        #[serde(default)]
        n: u32,
    },
    J {
        g: u32,
    },
    H {
        g: u32,
    },
    #[serde(rename = "theta_null")]
    ThetaNull {
        g: u32,
    },
    #[serde(rename = "abelian")]
    Abelian {
        g: u32,
    },
    #[serde(rename = "theta")]
    Theta {
        g: u32,
    },
    #[serde(rename = "finite")]
    Finite,
}

impl Term {
    pub fn dim(&self) -> u32 {
        match *self {
            Term::A { g } => dim_a(g),
            Term::M { g, n } => dim_m(g, n),
            Term::J { g } => dim_m(g, 0),
            Term::H { g } => dim_h(g),
            Term::ThetaNull { g } => dim_m(g, 0) - 1,
            Term::Abelian { g } => g,
            Term::Theta { g } => g - 1,
            Term::Finite => 0,
        }
    }
}

pub fn dim_a(g: u32) -> u32 {
    g * (g + 1) / 2
}

/// `3g - 3 + n`, with the usual values 1 and 0 for genus 1 and 0 curves
/// carrying enough points.
pub fn dim_m(g: u32, n: u32) -> u32 {
    (3 * g + n).saturating_sub(3)
}

pub fn dim_h(g: u32) -> u32 {
    2 * g - 1
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RowDecl {
    pub name: String,
    pub note: String,
    pub compact: Vec<Term>,
    pub extension: Option<Vec<Term>>,
    pub expected_compact: Vec<u32>,
    pub expected_extension: Option<u32>,
    pub relation: Relation,
    pub expected_total: u32,
}

#[derive(Deserialize)]
struct TableDecl {
    row: Vec<RowDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowResult {
    pub name: String,
    pub compact: Vec<u32>,
    pub compact_dim: u32,
    pub extension_dim: Option<u32>,
    pub total: u32,
    pub relation: Relation,
    pub expected_total: u32,
    pub matches: bool,
    pub note: String,
}

pub fn declared_rows() -> Result<Vec<RowDecl>> {
    parse_rows(TABLE)
}

pub fn parse_rows(text: &str) -> Result<Vec<RowDecl>> {
    let t: TableDecl = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(t.row)
}

/// Recomputes one row. For an `le` row the recomputed total is an upper
/// bound and must equal the declared bound.
pub fn evaluate(row: &RowDecl) -> RowResult {
    let compact: Vec<u32> = row.compact.iter().map(Term::dim).collect();
    let compact_dim = compact.iter().sum();
    let extension_dim = row
        .extension
        .as_ref()
        .map(|ts| ts.iter().map(Term::dim).sum());
    let total = compact_dim + extension_dim.unwrap_or(0);
    let matches = compact == row.expected_compact
        && extension_dim == row.expected_extension
        && total == row.expected_total;
    RowResult {
        name: row.name.clone(),
        compact,
        compact_dim,
        extension_dim,
        total,
        relation: row.relation,
        expected_total: row.expected_total,
        matches,
        note: row.note.clone(),
    }
}

pub fn strata_rows() -> Result<Vec<RowResult>> {
    Ok(declared_rows()?.iter().map(evaluate).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str) -> RowResult {
        strata_rows()
            .unwrap()
            .into_iter()
            .find(|r| r.name == name)
            .unwrap()
    }

    #[test]
    fn moduli_dimensions() {
        assert_eq!(dim_a(1), 1);
        assert_eq!(dim_a(2), 3);
        assert_eq!(dim_a(5), 15);
        assert_eq!(dim_m(4, 0), 9);
        assert_eq!(dim_m(2, 1), 4);
        assert_eq!(dim_h(5), 9);
        assert_eq!(dim_h(3), 5);
    }

    #[test]
    fn a3_row() {
        let r = row("A3");
        assert_eq!(r.compact, vec![1, 5]);
        assert_eq!(r.extension_dim, Some(3));
        assert_eq!(r.total, 9);
        assert!(r.matches);
    }

    #[test]
    fn a4_and_a2_rows() {
        assert_eq!(row("A4").total, 8);
        assert_eq!(row("A2").compact, vec![1, 8]);
        assert_eq!(row("A2").total, 9);
    }

    #[test]
    fn all_rows_match() {
        let rows = strata_rows().unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.matches));
        assert_eq!(row("A5").relation, Relation::Le);
    }

    #[test]
    fn mismatch_is_detected() {
        let text = TABLE.replace(
            "expected_total = 8\n\n[[row]]\nname = \"A5\"",
            "expected_total = 9\n\n[[row]]\nname = \"A5\"",
        );
        let rows: Vec<RowResult> = parse_rows(&text).unwrap().iter().map(evaluate).collect();
        assert!(!rows.iter().find(|r| r.name == "A4").unwrap().matches);
    }
}
