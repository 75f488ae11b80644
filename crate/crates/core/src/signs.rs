use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignKind {
    /// i.i.d. uniform ±1 entries.
    Rademacher,
    /// ±1 entries with equal numbers of each sign.
    Balanced,
    /// Entries in {-1, 0, +1}.
    Transductive,
}

/// A vector of signs in {-1, 0, +1} tagged with the distribution it came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector {
    entries: Vec<i8>,
    kind: SignKind,
}

impl SignVector {
    pub fn new(entries: Vec<i8>, kind: SignKind) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|&&e| !(-1..=1).contains(&e)) {
            return Err(Error::InvalidArgument(format!(
                "sign entries must be -1, 0 or +1, got {bad}"
            )));
        }
        match kind {
            SignKind::Rademacher | SignKind::Balanced if entries.contains(&0) => {
                return Err(Error::InvalidArgument(format!(
                    "{kind:?} sign vectors cannot contain zeros"
                )));
            }
            SignKind::Balanced if entries.len() % 2 != 0 => {
                return Err(Error::Parity(format!(
                    "balanced sign vectors need even length, got {}",
                    entries.len()
                )));
            }
            SignKind::Balanced if excess(&entries) != 0 => {
                return Err(Error::InvalidArgument(format!(
                    "balanced sign vector has entry sum {}",
                    excess(&entries)
                )));
            }
            _ => {}
        }
        Ok(Self { entries, kind })
    }

    pub fn rademacher(entries: Vec<i8>) -> Result<Self> {
        Self::new(entries, SignKind::Rademacher)
    }

    pub fn balanced(entries: Vec<i8>) -> Result<Self> {
        Self::new(entries, SignKind::Balanced)
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<i8> {
        self.entries
    }

    pub fn kind(&self) -> SignKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry sum.
    pub fn excess(&self) -> i64 {
        excess(&self.entries)
    }

    pub fn is_balanced(&self) -> bool {
        !self.entries.contains(&0) && self.excess() == 0
    }
}

pub(crate) fn excess(entries: &[i8]) -> i64 {
    entries.iter().map(|&e| i64::from(e)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_invariants() {
        assert!(SignVector::rademacher(vec![1, 0]).is_err());
        assert!(SignVector::balanced(vec![1, 1]).is_err());
        assert!(matches!(SignVector::balanced(vec![1, -1, 1]), Err(Error::Parity(_))));
        assert!(SignVector::balanced(vec![1, -1, -1, 1]).is_ok());
        assert!(SignVector::new(vec![0, 0, 1], SignKind::Transductive).is_ok());
        assert!(SignVector::new(vec![2], SignKind::Transductive).is_err());
    }

    #[test]
    fn excess_and_balance() {
        let v = SignVector::rademacher(vec![1, 1, 1, -1]).unwrap();
        assert_eq!(v.excess(), 2);
        assert!(!v.is_balanced());
    }
}
