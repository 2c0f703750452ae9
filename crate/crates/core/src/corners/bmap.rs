use std::collections::BTreeSet;

use num_traits::{One, Signed};

use super::{
    extended_union, inf_order, scale_set, sum_sets, CornersError, FaceId, IndexFamily, IndexSet,
    Order, Space,
};
use crate::Rational;

/// A b-map between manifolds with corners, recorded by its exponent matrix:
/// `f*ρ_H = a_H ∏_G ρ_G^{e(G,H)}` with `a_H > 0`.
///
/// Rows are indexed by source faces, columns by target faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BMap {
    source: Space,
    target: Space,
    e: Vec<Vec<u32>>,
    image_in: BTreeSet<FaceId>,
    interior: bool,
    /// Declared, not computed: the exponent matrix cannot see whether the
    /// map is a b-submersion.
    submersion_witness: bool,
}

impl BMap {
    /// An interior b-map.
    pub fn new(
        source: Space,
        target: Space,
        e: Vec<Vec<u32>>,
        submersion_witness: bool,
    ) -> Result<Self, CornersError> {
        Self::from_parts(source, target, e, BTreeSet::new(), true, submersion_witness)
    }

    pub fn from_parts(
        source: Space,
        target: Space,
        e: Vec<Vec<u32>>,
        image_in: BTreeSet<FaceId>,
        interior: bool,
        submersion_witness: bool,
    ) -> Result<Self, CornersError> {
        let cols = e.first().map_or(target.len(), Vec::len);
        if e.len() != source.len() || e.iter().any(|row| row.len() != target.len()) {
            return Err(CornersError::Shape {
                rows: e.len(),
                cols,
                want_rows: source.len(),
                want_cols: target.len(),
            });
        }
        if interior != image_in.is_empty() {
            return Err(CornersError::InteriorMismatch(image_in.len()));
        }
        if let Some(bad) = image_in.iter().find(|h| h.0 >= target.len()) {
            return Err(CornersError::UnknownFace(format!("#{}", bad.0)));
        }
        Ok(BMap {
            source,
            target,
            e,
            image_in,
            interior,
            submersion_witness,
        })
    }

    /// Build an interior map from `(source face, [(target face, exponent)])`
    /// entries; unlisted entries are zero.
    pub fn from_entries<'a>(
        source: &Space,
        target: &Space,
        entries: impl IntoIterator<Item = (&'a str, &'a str, u32)>,
        submersion_witness: bool,
    ) -> Result<Self, CornersError> {
        let mut e = vec![vec![0; target.len()]; source.len()];
        for (g, h, value) in entries {
            e[source.face(g)?.0][target.face(h)?.0] = value;
        }
        Self::new(source.clone(), target.clone(), e, submersion_witness)
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.e
    }

    pub fn exponent(&self, g: FaceId, h: FaceId) -> u32 {
        self.e[g.0][h.0]
    }

    pub fn exponent_by_label(&self, g: &str, h: &str) -> Result<u32, CornersError> {
        Ok(self.exponent(self.source.face(g)?, self.target.face(h)?))
    }

    pub fn is_interior(&self) -> bool {
        self.interior
    }

    pub fn image_in(&self) -> &BTreeSet<FaceId> {
        &self.image_in
    }

    pub fn submersion_witness(&self) -> bool {
        self.submersion_witness
    }

    /// Source faces with a positive exponent towards `h`.
    pub fn preimage(&self, h: FaceId) -> Vec<(FaceId, u32)> {
        self.e
            .iter()
            .enumerate()
            .filter(|(_, row)| row[h.0] > 0)
            .map(|(g, row)| (FaceId(g), row[h.0]))
            .collect()
    }

    /// Source faces whose whole row vanishes: they map into the interior.
    pub fn interior_mapped(&self) -> Vec<FaceId> {
        self.e
            .iter()
            .enumerate()
            .filter(|(_, row)| row.iter().all(|&x| x == 0))
            .map(|(g, _)| FaceId(g))
            .collect()
    }
}

/// Each source face enters the pull-back of at most one target defining function.
pub fn is_b_normal(f: &BMap) -> bool {
    f.e.iter().all(|row| row.iter().filter(|&&x| x != 0).count() <= 1)
}

pub fn is_b_fibration(f: &BMap) -> bool {
    f.interior && is_b_normal(f) && f.submersion_witness
}

/// Exponent matrix of `g ∘ f` is the product `e_f · e_g`.
pub fn compose_bmaps(f: &BMap, g: &BMap) -> Result<BMap, CornersError> {
    if f.target != g.source {
        return Err(CornersError::SpaceMismatch);
    }
    if !f.interior || !g.interior {
        return Err(CornersError::NotInterior);
    }
    let e = f
        .e
        .iter()
        .map(|row| {
            (0..g.target.len())
                .map(|k| row.iter().enumerate().map(|(h, &x)| x * g.e[h][k]).sum())
                .collect()
        })
        .collect();
    BMap::new(
        f.source.clone(),
        g.target.clone(),
        e,
        f.submersion_witness && g.submersion_witness,
    )
}

/// `(f*𝓔)(G) = Σ_H e(G,H)·𝓔(H)`; an empty sum is `ℕ`.
pub fn pullback_family(f: &BMap, family: &IndexFamily) -> Result<IndexFamily, CornersError> {
    if !f.interior {
        return Err(CornersError::NotInterior);
    }
    if family.space() != &f.target {
        return Err(CornersError::SpaceMismatch);
    }
    let mut sets = Vec::with_capacity(f.source.len());
    for row in &f.e {
        let mut acc = IndexSet::naturals();
        for (h, &x) in row.iter().enumerate() {
            if x > 0 {
                let scaled = scale_set(Rational::from_integer(x.into()), family.get(FaceId(h)))?;
                acc = sum_sets(&acc, &scaled);
            }
        }
        sets.push(acc);
    }
    Ok(IndexFamily::from_sets(&f.source, sets))
}

/// `(f_*𝓔)(H) = ∪̄_{G : e(G,H) > 0} (1/e(G,H))·𝓔(G)`.
///
/// Faces mapped into the interior must be integrable there: their index set
/// is empty or has positive infimum.
pub fn pushforward_family(f: &BMap, family: &IndexFamily) -> Result<IndexFamily, CornersError> {
    if !is_b_fibration(f) {
        return Err(CornersError::NotBFibration);
    }
    if family.space() != &f.source {
        return Err(CornersError::SpaceMismatch);
    }
    for g in f.interior_mapped() {
        if let Order::Finite(z) = inf_order(family.get(g)) {
            if !z.is_positive() {
                return Err(CornersError::IntegrabilityViolated(
                    f.source.label(g).to_string(),
                ));
            }
        }
    }
    let mut sets = Vec::with_capacity(f.target.len());
    for h in 0..f.target.len() {
        let mut acc = IndexSet::empty();
        for (g, x) in f.preimage(FaceId(h)) {
            let scaled = scale_set(
                Rational::one() / Rational::from_integer(x.into()),
                family.get(g),
            )?;
            acc = extended_union(&acc, &scaled);
        }
        sets.push(acc);
    }
    Ok(IndexFamily::from_sets(&f.target, sets))
}
