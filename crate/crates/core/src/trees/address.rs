use std::fmt;
use std::str::FromStr;

/// Position of a vertex in the preorder array of a [`RootedTree`](super::RootedTree).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIx(pub u32);

impl NodeIx {
    pub const ROOT: NodeIx = NodeIx(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ulam–Harris address: the 1-based child indices on the path from the root.
///
/// The empty address is the root. Addresses order lexicographically, which
/// coincides with the preorder of the tree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(Vec<u32>);

impl VertexId {
    pub fn root() -> Self {
        VertexId(Vec::new())
    }

    pub fn new(path: Vec<u32>) -> Self {
        VertexId(path)
    }

    pub fn path(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: u32) -> Self {
        let mut path = self.0.clone();
        path.push(index);
        VertexId(path)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(VertexId(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// True when `self` is an ancestor of `other` or equal to it.
    pub fn is_prefix_of(&self, other: &VertexId) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<u32>> for VertexId {
    fn from(path: Vec<u32>) -> Self {
        VertexId(path)
    }
}

impl From<&[u32]> for VertexId {
    fn from(path: &[u32]) -> Self {
        VertexId(path.to_vec())
    }
}

/// Root prints as `-`, everything else as dot-separated indices (`1.3.2`).
impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid vertex address {0:?}")]
pub struct AddressParseError(pub String);

impl FromStr for VertexId {
    type Err = AddressParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(VertexId::root());
        }
        s.split('.')
            .map(|part| match part.parse::<u32>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(AddressParseError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(VertexId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        let v = VertexId::new(vec![1, 3, 2]);
        assert_eq!(v.to_string(), "1.3.2");
        assert_eq!("1.3.2".parse::<VertexId>().unwrap(), v);
        assert_eq!(VertexId::root().to_string(), "-");
        assert_eq!("-".parse::<VertexId>().unwrap(), VertexId::root());
        assert!("1.0".parse::<VertexId>().is_err());
        assert!("a".parse::<VertexId>().is_err());
    }

    #[test]
    fn prefix_relation() {
        let a = VertexId::new(vec![2]);
        let b = VertexId::new(vec![2, 1, 1]);
        assert!(a.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!(VertexId::root().is_prefix_of(&a));
        assert_eq!(b.parent().unwrap().parent().unwrap(), a);
    }
}
