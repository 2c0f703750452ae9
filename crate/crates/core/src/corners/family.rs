use std::fmt;

use super::{CornersError, FaceId, IndexSet, Space};

/// An index set for every face of a [`Space`]; faces not mentioned carry `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexFamily {
    space: Space,
    sets: Vec<IndexSet>,
}

impl IndexFamily {
    /// All faces empty.
    pub fn empty(space: &Space) -> Self {
        IndexFamily {
            space: space.clone(),
            sets: vec![IndexSet::empty(); space.len()],
        }
    }

    /// All faces `ℕ`.
    pub fn smooth(space: &Space) -> Self {
        IndexFamily {
            space: space.clone(),
            sets: vec![IndexSet::naturals(); space.len()],
        }
    }

    pub fn from_labels<'a>(
        space: &Space,
        entries: impl IntoIterator<Item = (&'a str, IndexSet)>,
    ) -> Result<Self, CornersError> {
        let mut family = Self::empty(space);
        for (label, set) in entries {
            let id = space.face(label)?;
            family.sets[id.0] = set;
        }
        Ok(family)
    }

    pub(crate) fn from_sets(space: &Space, sets: Vec<IndexSet>) -> Self {
        debug_assert_eq!(space.len(), sets.len());
        IndexFamily { space: space.clone(), sets }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn get(&self, face: FaceId) -> &IndexSet {
        &self.sets[face.0]
    }

    pub fn at(&self, label: &str) -> Result<&IndexSet, CornersError> {
        Ok(self.get(self.space.face(label)?))
    }

    pub fn set(&mut self, face: FaceId, set: IndexSet) {
        self.sets[face.0] = set;
    }

    pub fn iter(&self) -> impl Iterator<Item = (FaceId, &IndexSet)> {
        self.sets.iter().enumerate().map(|(i, s)| (FaceId(i), s))
    }

    /// Apply `f` face by face against another family on the same space.
    pub fn zip_with(
        &self,
        other: &IndexFamily,
        f: impl Fn(&IndexSet, &IndexSet) -> IndexSet,
    ) -> Result<IndexFamily, CornersError> {
        if self.space != other.space {
            return Err(CornersError::SpaceMismatch);
        }
        Ok(IndexFamily {
            space: self.space.clone(),
            sets: self.sets.iter().zip(&other.sets).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn map(&self, f: impl Fn(FaceId, &IndexSet) -> IndexSet) -> IndexFamily {
        IndexFamily {
            space: self.space.clone(),
            sets: self.iter().map(|(id, s)| f(id, s)).collect(),
        }
    }
}

impl fmt::Display for IndexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, face) in self.space.faces().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", face.label, self.sets[i])?;
        }
        f.write_str("}")
    }
}
