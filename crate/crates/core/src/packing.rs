//! Packing sequences `(1^a, 2^b, ...)` and colorings that partition the
//! vertices into classes, each class carrying its distance parameter.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceParseError {
    #[error("sequence must be wrapped in parentheses: `{0}`")]
    MissingParens(String),
    #[error("malformed term `{0}`")]
    BadTerm(String),
    #[error("distance parameters and multiplicities must be positive: `{0}`")]
    ZeroValue(String),
}

/// A multiset of distance parameters, stored as parameter -> multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackingSequence {
    counts: BTreeMap<u32, usize>,
}

impl PackingSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(1^ones, 2^twos, 3^threes)`, omitting zero multiplicities.
    pub fn ones_twos_threes(ones: usize, twos: usize, threes: usize) -> Self {
        Self::from_counts([(1, ones), (2, twos), (3, threes)])
    }

    pub fn from_counts<I: IntoIterator<Item = (u32, usize)>>(counts: I) -> Self {
        let mut seq = Self::new();
        for (s, m) in counts {
            seq.add(s, m);
        }
        seq
    }

    pub fn add(&mut self, s: u32, m: usize) {
        assert!(s >= 1, "distance parameters are positive");
        if m > 0 {
            *self.counts.entry(s).or_insert(0) += m;
        }
    }

    pub fn count(&self, s: u32) -> usize {
        self.counts.get(&s).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `(parameter, multiplicity)` pairs by ascending parameter.
    pub fn iter(&self) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.counts.iter().map(|(&s, &m)| (s, m))
    }

    /// The parameters in non-decreasing order, one entry per class.
    pub fn expanded(&self) -> Vec<u32> {
        self.iter()
            .flat_map(|(s, m)| std::iter::repeat_n(s, m))
            .collect()
    }

    pub fn max_parameter(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }

    /// Whether classes with these parameters can be assigned to distinct
    /// slots of `budget`, a class of parameter `s` taking a slot of
    /// parameter at most `s` (a class spaced by `s` is also spaced by any
    /// smaller parameter).
    pub fn fits_within(&self, budget: &PackingSequence) -> bool {
        // Hall's condition on the threshold structure: for every r, the
        // classes with parameter <= r need that many slots with parameter <= r.
        let mut thresholds: Vec<u32> = self.counts.keys().copied().collect();
        thresholds.extend(budget.counts.keys().copied());
        thresholds.sort_unstable();
        thresholds.dedup();
        thresholds.iter().all(|&r| {
            let need: usize = self.counts.range(..=r).map(|(_, m)| m).sum();
            let have: usize = budget.counts.range(..=r).map(|(_, m)| m).sum();
            need <= have
        }) && self.total() <= budget.total()
    }
}

impl fmt::Display for PackingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (s, m)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}^{m}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for PackingSequence {
    type Err = SequenceParseError;

    /// Parses `(1^2,2)`, `(1^3,2^1,3^2)` and the like; `^1` may be omitted
    /// and surrounding whitespace is ignored.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| SequenceParseError::MissingParens(text.to_string()))?;
        let mut seq = PackingSequence::new();
        if inner.trim().is_empty() {
            return Ok(seq);
        }
        for term in inner.split(',') {
            let term = term.trim();
            let (s, m) = match term.split_once('^') {
                Some((s, m)) => (s.trim(), m.trim()),
                None => (term, "1"),
            };
            let s: u32 = s
                .parse()
                .map_err(|_| SequenceParseError::BadTerm(term.to_string()))?;
            let m: usize = m
                .parse()
                .map_err(|_| SequenceParseError::BadTerm(term.to_string()))?;
            if s == 0 || m == 0 {
                return Err(SequenceParseError::ZeroValue(term.to_string()));
            }
            seq.add(s, m);
        }
        Ok(seq)
    }
}

/// One color class: every two members must be at distance above `parameter`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorClass {
    pub parameter: u32,
    pub vertices: Vec<usize>,
}

/// A total or partial packing coloring.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackingColoring {
    pub classes: Vec<ColorClass>,
    pub uncolored: Vec<usize>,
}

impl PackingColoring {
    /// Builds a coloring from per-vertex class indices into `parameters`.
    /// Empty classes are dropped; `None` entries become uncolored.
    pub fn from_assignment(parameters: &[u32], assignment: &[Option<usize>]) -> Self {
        let mut buckets = vec![Vec::new(); parameters.len()];
        let mut uncolored = Vec::new();
        for (v, slot) in assignment.iter().enumerate() {
            match slot {
                Some(c) => buckets[*c].push(v),
                None => uncolored.push(v),
            }
        }
        let classes = parameters
            .iter()
            .zip(buckets)
            .filter(|(_, vs)| !vs.is_empty())
            .map(|(&parameter, vertices)| ColorClass {
                parameter,
                vertices,
            })
            .collect();
        PackingColoring { classes, uncolored }
    }

    /// The multiset of parameters of the nonempty classes.
    pub fn sequence(&self) -> PackingSequence {
        let mut seq = PackingSequence::new();
        for class in self.classes.iter().filter(|c| !c.vertices.is_empty()) {
            seq.add(class.parameter, 1);
        }
        seq
    }

    pub fn is_total(&self) -> bool {
        self.uncolored.is_empty()
    }

    /// Class index of every vertex of an `n`-vertex graph.
    pub fn assignment(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (i, class) in self.classes.iter().enumerate() {
            for &v in &class.vertices {
                if v < n {
                    out[v] = Some(i);
                }
            }
        }
        out
    }

    /// Sorts members, drops empty classes and orders classes by
    /// (parameter, smallest member).
    pub fn normalize(&mut self) {
        for class in &mut self.classes {
            class.vertices.sort_unstable();
        }
        self.classes.retain(|c| !c.vertices.is_empty());
        self.classes
            .sort_by(|a, b| (a.parameter, a.vertices[0]).cmp(&(b.parameter, b.vertices[0])));
        self.uncolored.sort_unstable();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_print() {
        let seq: PackingSequence = "(1^2,2)".parse().unwrap();
        assert_eq!(seq.count(1), 2);
        assert_eq!(seq.count(2), 1);
        assert_eq!(seq.to_string(), "(1^2,2^1)");
        let seq: PackingSequence = " ( 2^3 , 1 ) ".parse().unwrap();
        assert_eq!(seq.to_string(), "(1^1,2^3)");
        assert_eq!(seq.expanded(), vec![1, 2, 2, 2]);
        assert!("1^2,2".parse::<PackingSequence>().is_err());
        assert!("(1^x)".parse::<PackingSequence>().is_err());
        assert!("(0^2)".parse::<PackingSequence>().is_err());
        assert!("()".parse::<PackingSequence>().unwrap().is_empty());
    }

    #[test]
    fn fitting() {
        let budget = PackingSequence::ones_twos_threes(2, 0, 1);
        assert!(PackingSequence::ones_twos_threes(2, 0, 1).fits_within(&budget));
        assert!(PackingSequence::ones_twos_threes(2, 0, 0).fits_within(&budget));
        // a 3-class may stand in for a 1-class
        assert!(PackingSequence::ones_twos_threes(1, 0, 2).fits_within(&budget));
        // but not the other way round
        assert!(!PackingSequence::ones_twos_threes(3, 0, 0).fits_within(&budget));
        assert!(!PackingSequence::ones_twos_threes(2, 1, 0).fits_within(&budget));
        let b = PackingSequence::ones_twos_threes(3, 3, 0);
        assert!(PackingSequence::ones_twos_threes(3, 2, 0).fits_within(&b));
        assert!(!PackingSequence::ones_twos_threes(4, 0, 0).fits_within(&b));
    }

    #[test]
    fn coloring_from_assignment() {
        let col = PackingColoring::from_assignment(&[1, 1, 2], &[Some(0), Some(1), None, Some(0)]);
        assert_eq!(col.classes.len(), 2);
        assert_eq!(col.uncolored, vec![2]);
        assert_eq!(col.sequence().to_string(), "(1^2)");
        assert_eq!(col.assignment(4), vec![Some(0), Some(1), None, Some(0)]);
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(counts in proptest::collection::btree_map(1u32..6, 1usize..5, 0..4)) {
            let seq = PackingSequence::from_counts(counts);
            let back: PackingSequence = seq.to_string().parse().unwrap();
            prop_assert_eq!(back, seq);
        }
    }
}
