//! Combinatorics of manifolds with corners.
//!
//! Nothing here knows about charts or functions. A manifold with corners is
//! reduced to its list of boundary hypersurfaces ([`Space`]), a b-map to the
//! matrix of exponents with which it pulls back boundary defining functions
//! ([`BMap`]), and a polyhomogeneous function to the index sets it has at
//! each face ([`IndexFamily`]). All arithmetic is exact.

mod blowup;
mod bmap;
mod family;
mod index_set;

pub use blowup::{
    chained_density_exponents, commute_blowups, density_lift_exponent, BlowupStep,
    CenterRelation,
};
pub use bmap::{compose_bmaps, is_b_fibration, is_b_normal, pullback_family, pushforward_family, BMap};
pub use family::IndexFamily;
pub use index_set::{
    extended_union, inf_order, member, scale_set, sum_sets, IndexSet, IndexTerm, Order,
};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CornersError {
    #[error("space must have at least one face")]
    EmptySpace,
    #[error("duplicate face label `{0}`")]
    DuplicateFace(String),
    #[error("unknown face `{0}`")]
    UnknownFace(String),
    #[error("exponent matrix has shape {rows}x{cols}, expected {want_rows}x{want_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("interior flag disagrees with image_in ({0} faces mapped into the boundary)")]
    InteriorMismatch(usize),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(crate::Rational),
    #[error("b-maps do not compose: target of the first is not the source of the second")]
    SpaceMismatch,
    #[error("operation requires an interior b-map")]
    NotInterior,
    #[error("push-forward requires a b-fibration")]
    NotBFibration,
    #[error("integrability violated at face `{0}`: it maps into the interior but its index set has infimum <= 0")]
    IntegrabilityViolated(String),
    #[error("blow-up step `{step}` inherits from unknown face `{face}`")]
    DanglingInheritance { step: String, face: String },
    #[error("blow-up step `{0}` has k > n")]
    InvalidStep(String),
}

/// Position of a face inside its [`Space`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId(pub usize);

/// A boundary hypersurface.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Face {
    pub id: FaceId,
    pub label: String,
}

/// The combinatorial shadow of a manifold with corners: its ordered list of
/// boundary hypersurfaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Space {
    name: String,
    faces: Vec<Face>,
}

impl Space {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self, CornersError> {
        let mut faces: Vec<Face> = Vec::new();
        for (i, label) in labels.into_iter().enumerate() {
            let label = label.into();
            if faces.iter().any(|f| f.label == label) {
                return Err(CornersError::DuplicateFace(label));
            }
            faces.push(Face { id: FaceId(i), label });
        }
        if faces.is_empty() {
            return Err(CornersError::EmptySpace);
        }
        Ok(Space { name: name.into(), faces })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face(&self, label: &str) -> Result<FaceId, CornersError> {
        self.faces
            .iter()
            .find(|f| f.label == label)
            .map(|f| f.id)
            .ok_or_else(|| CornersError::UnknownFace(label.to_string()))
    }

    pub fn label(&self, id: FaceId) -> &str {
        &self.faces[id.0].label
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.name)?;
        for (i, face) in self.faces.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&face.label)?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_rejects_duplicates_and_empty() {
        assert_eq!(
            Space::new("X", ["ff", "tf", "ff"]),
            Err(CornersError::DuplicateFace("ff".into()))
        );
        assert_eq!(Space::new("X", Vec::<String>::new()), Err(CornersError::EmptySpace));
    }

    #[test]
    fn face_lookup() {
        let x = Space::new("X1", ["ff", "tf"]).unwrap();
        assert_eq!(x.face("tf").unwrap(), FaceId(1));
        assert_eq!(x.label(FaceId(0)), "ff");
        assert!(x.face("tb").is_err());
        assert_eq!(x.to_string(), "X1{ff, tf}");
    }
}
