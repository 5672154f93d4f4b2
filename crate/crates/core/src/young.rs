//! Young diagrams labelling `U(N)` multiplets and the dominance order on them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::Sector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum YoungError {
    #[error("row lengths must be positive and non-ascending, got {0:?}")]
    NotAPartition(Vec<usize>),
    #[error("a sector with no particles has no Young diagram")]
    NoParticles,
    #[error("diagram has {rows} rows but SU({flavors}) allows at most {flavors}")]
    TooManyRows { rows: usize, flavors: usize },
    #[error("cannot parse diagram {0:?}")]
    Parse(String),
}

/// Non-ascending positive row lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

/// Outcome of comparing two diagrams in the dominance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// The left diagram strictly dominates the right one.
    Above,
    Below,
    Equal,
    Incomparable,
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self, YoungError> {
        if rows.is_empty() || rows.contains(&0) || rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(YoungError::NotAPartition(rows));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_boxes(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Diagram whose rows are the nonzero counts of `sector`, sorted.
    pub fn from_sector(sector: &Sector) -> Result<Self, YoungError> {
        let mut rows: Vec<usize> = sector.counts().iter().copied().filter(|&m| m > 0).collect();
        if rows.is_empty() {
            return Err(YoungError::NoParticles);
        }
        rows.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { rows })
    }

    /// The nonascending sector whose highest weight is this diagram.
    pub fn highest_weight(&self, flavors: usize) -> Result<Sector, YoungError> {
        self.check_rows(flavors)?;
        let mut counts = self.rows.clone();
        counts.resize(flavors, 0);
        Ok(Sector::new(counts))
    }

    fn check_rows(&self, flavors: usize) -> Result<(), YoungError> {
        if self.rows.len() > flavors {
            return Err(YoungError::TooManyRows {
                rows: self.rows.len(),
                flavors,
            });
        }
        Ok(())
    }

    /// Dominance comparison by prefix sums. Diagrams with different box
    /// counts are incomparable.
    pub fn dominance(&self, other: &YoungDiagram) -> Dominance {
        if self.num_boxes() != other.num_boxes() {
            return Dominance::Incomparable;
        }
        let depth = self.rows.len().max(other.rows.len());
        let (mut a, mut b) = (0usize, 0usize);
        let (mut some_greater, mut some_less) = (false, false);
        for i in 0..depth {
            a += self.rows.get(i).copied().unwrap_or(0);
            b += other.rows.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Greater => some_greater = true,
                Ordering::Less => some_less = true,
                Ordering::Equal => {}
            }
        }
        match (some_greater, some_less) {
            (false, false) => Dominance::Equal,
            (true, false) => Dominance::Above,
            (false, true) => Dominance::Below,
            (true, true) => Dominance::Incomparable,
        }
    }

    /// Reflection across the main diagonal.
    pub fn conjugate(&self) -> YoungDiagram {
        let width = self.rows[0];
        let rows = (1..=width)
            .map(|i| self.rows.iter().filter(|&&r| r >= i).count())
            .collect();
        YoungDiagram { rows }
    }

    /// Dimension of the `SU(N)` irrep, from the Weyl dimension formula
    /// `prod_{i<j} (l_i - l_j + j - i) / (j - i)` with rows padded to `N`.
    pub fn irrep_dimension(&self, flavors: usize) -> Result<u128, YoungError> {
        self.check_rows(flavors)?;
        let mut padded = self.rows.clone();
        padded.resize(flavors, 0);
        let (mut num, mut den) = (1u128, 1u128);
        for i in 0..flavors {
            for j in i + 1..flavors {
                num *= (padded[i] - padded[j] + j - i) as u128;
                den *= (j - i) as u128;
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
        }
        debug_assert_eq!(den, 1);
        Ok(num / den)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The dominance-minimal diagram of `boxes` boxes with at most `flavors` rows:
/// full columns of height `N` and one column of height `boxes mod N`.
pub fn ground_diagram(boxes: usize, flavors: usize) -> Result<YoungDiagram, YoungError> {
    if boxes == 0 {
        return Err(YoungError::NoParticles);
    }
    let (q, m) = (boxes / flavors, boxes % flavors);
    let rows = (0..flavors)
        .map(|i| if i < m { q + 1 } else { q })
        .filter(|&r| r > 0)
        .collect();
    Ok(YoungDiagram { rows })
}

/// All partitions of `boxes` into at most `max_rows` parts, in reverse
/// lexicographic order (the one-row diagram first).
pub fn enumerate_diagrams(boxes: usize, max_rows: usize) -> Vec<YoungDiagram> {
    fn rec(left: usize, cap: usize, rows_left: usize, prefix: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if left == 0 {
            out.push(YoungDiagram {
                rows: prefix.clone(),
            });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for r in (1..=cap.min(left)).rev() {
            prefix.push(r);
            rec(left - r, r, rows_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if boxes > 0 {
        rec(boxes, boxes, max_rows, &mut Vec::new(), &mut out);
    }
    out
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for YoungDiagram {
    type Err = YoungError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| YoungError::Parse(s.to_string()))?;
        YoungDiagram::new(rows)
    }
}

impl TryFrom<String> for YoungDiagram {
    type Error = YoungError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<YoungDiagram> for String {
    fn from(d: YoungDiagram) -> String {
        d.to_string()
    }
}
