use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use crate::corners::{
    chained_density_exponents, is_b_fibration, is_b_normal, BMap, BlowupStep, CornersError, Space,
};

/// Where a boundary face of `[0,∞) × Xⁿ` (after the blow-ups) lives at `t = 0`:
/// the set of factor indices whose `x` vanishes, and the subset of those that
/// are additionally forced to coincide (the cusp diagonal directions).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Stratum {
    zeros: BTreeSet<u8>,
    coincide: BTreeSet<u8>,
}

impl Stratum {
    fn new(zeros: &[u8], coincide: &[u8]) -> Self {
        let zeros: BTreeSet<u8> = zeros.iter().copied().collect();
        let mut coincide: BTreeSet<u8> = coincide.iter().copied().collect();
        if coincide.len() < 2 {
            coincide.clear();
        }
        Stratum { zeros, coincide }
    }

    /// Image under the projection forgetting factor `drop`; the remaining
    /// factors are renumbered `1, 2, ...` in order.
    fn forget(&self, drop: u8) -> Stratum {
        let renumber = |i: u8| if i > drop { i - 1 } else { i };
        let zeros: Vec<u8> = self.zeros.iter().filter(|&&i| i != drop).map(|&i| renumber(i)).collect();
        let coincide: Vec<u8> =
            self.coincide.iter().filter(|&&i| i != drop).map(|&i| renumber(i)).collect();
        Stratum::new(&zeros, &coincide)
    }
}

fn simple_strata() -> Vec<(&'static str, Stratum)> {
    vec![("ff", Stratum::new(&[1], &[])), ("tf", Stratum::new(&[], &[]))]
}

fn double_strata() -> Vec<(&'static str, Stratum)> {
    // Br_i is the face on which x_i stays free.
    vec![
        ("ff_b", Stratum::new(&[1, 2], &[])),
        ("ff_c", Stratum::new(&[1, 2], &[1, 2])),
        ("Br1", Stratum::new(&[2], &[])),
        ("Br2", Stratum::new(&[1], &[])),
        ("tb", Stratum::new(&[], &[])),
    ]
}

fn triple_strata() -> Vec<(&'static str, Stratum)> {
    vec![
        ("fff_b", Stratum::new(&[1, 2, 3], &[])),
        ("fff_c", Stratum::new(&[1, 2, 3], &[1, 2, 3])),
        ("B1", Stratum::new(&[2, 3], &[])),
        ("B2", Stratum::new(&[1, 3], &[])),
        ("B3", Stratum::new(&[1, 2], &[])),
        ("P1", Stratum::new(&[1], &[])),
        ("P2", Stratum::new(&[2], &[])),
        ("P3", Stratum::new(&[3], &[])),
        ("C1", Stratum::new(&[1, 2, 3], &[2, 3])),
        ("C2", Stratum::new(&[1, 2, 3], &[1, 3])),
        ("C3", Stratum::new(&[1, 2, 3], &[1, 2])),
        ("T1", Stratum::new(&[2, 3], &[2, 3])),
        ("T2", Stratum::new(&[1, 3], &[1, 3])),
        ("T3", Stratum::new(&[1, 2], &[1, 2])),
        ("ttb", Stratum::new(&[], &[])),
    ]
}

fn space_of(name: &str, strata: &[(&'static str, Stratum)]) -> Space {
    Space::new(name, strata.iter().map(|(label, _)| *label)).expect("fixture labels are distinct")
}

/// Every face lands in exactly one target face, with exponent 1.
fn projection(
    source: &[(&'static str, Stratum)],
    target: &[(&'static str, Stratum)],
    drop: u8,
) -> Vec<Vec<u32>> {
    source
        .iter()
        .map(|(label, stratum)| {
            let image = stratum.forget(drop);
            let hit = target
                .iter()
                .position(|(_, s)| *s == image)
                .unwrap_or_else(|| panic!("face {label} has no image under forgetting x{drop}"));
            let mut row = vec![0; target.len()];
            row[hit] = 1;
            row
        })
        .collect()
}

/// Simple, double and triple cusp-surgery spaces with their projections.
#[derive(Debug, Clone)]
pub struct SurgeryFixture {
    pub x1: Space,
    pub x2: Space,
    pub x3: Space,
    /// `X¹ → [0,∞)`, the time projection used for traces.
    pub time: Space,
    pub pi2_1: BMap,
    pub pi2_2: BMap,
    pub pi3_12: BMap,
    pub pi3_23: BMap,
    pub pi3_13: BMap,
    pub pi_time: BMap,
    pub density_x2: BTreeMap<String, u32>,
    pub density_x3: BTreeMap<String, u32>,
    /// Power of `ρ_ff` in the lifted b-density `β*(μ ⊗ dt/t)` on `X¹`.
    pub omega_ff_exponent: u32,
}

pub fn build_fixture() -> SurgeryFixture {
    let s1 = simple_strata();
    let s2 = double_strata();
    let s3 = triple_strata();
    let x1 = space_of("X1cp", &s1);
    let x2 = space_of("X2cp", &s2);
    let x3 = space_of("X3cp", &s3);
    let time = Space::new("[0,inf)", ["{0}"]).expect("one face");

    let bmap = |src: &Space, tgt: &Space, e| {
        BMap::new(src.clone(), tgt.clone(), e, true).expect("projection matrices are well formed")
    };
    let pi2_1 = bmap(&x2, &x1, projection(&s2, &s1, 2));
    let pi2_2 = bmap(&x2, &x1, projection(&s2, &s1, 1));
    let pi3_12 = bmap(&x3, &x2, projection(&s3, &s2, 3));
    let pi3_23 = bmap(&x3, &x2, projection(&s3, &s2, 1));
    let pi3_13 = bmap(&x3, &x2, projection(&s3, &s2, 2));
    let pi_time = bmap(&x1, &time, vec![vec![1], vec![1]]);

    let density = |steps: &[BlowupStep], space: &Space| -> BTreeMap<String, u32> {
        let chained = chained_density_exponents(steps).expect("fixture chains are well formed");
        space
            .faces()
            .iter()
            .map(|f| (f.label.clone(), chained.get(&f.label).copied().unwrap_or(0)))
            .collect()
    };
    let density_x2 = density(
        &[BlowupStep::new(3, 1, "ff_b", []), BlowupStep::new(2, 1, "ff_c", ["ff_b"])],
        &x2,
    );
    // Only fff_b and fff_c carry kernel mass in a composition; the remaining
    // triple faces see empty index sets and keep exponent 0.
    let density_x3 = density(
        &[BlowupStep::new(4, 1, "fff_b", []), BlowupStep::new(4, 2, "fff_c", ["fff_b"])],
        &x3,
    );
    let omega_ff_exponent = chained_density_exponents(&[BlowupStep::new(2, 1, "ff", [])])
        .expect("single step")["ff"];

    SurgeryFixture {
        x1,
        x2,
        x3,
        time,
        pi2_1,
        pi2_2,
        pi3_12,
        pi3_23,
        pi3_13,
        pi_time,
        density_x2,
        density_x3,
        omega_ff_exponent,
    }
}

/// Shared read-only fixture.
pub fn fixture() -> &'static SurgeryFixture {
    static FIXTURE: OnceLock<SurgeryFixture> = OnceLock::new();
    FIXTURE.get_or_init(build_fixture)
}

/// Outcome of one fixture self-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
}

fn rows_match(
    f: &BMap,
    expected: &[(&str, &str)],
) -> Result<bool, CornersError> {
    // every listed entry is 1, every other entry in those rows is 0
    for (g, h) in expected {
        if f.exponent_by_label(g, h)? != 1 {
            return Ok(false);
        }
    }
    let listed: BTreeSet<&str> = expected.iter().map(|(g, _)| *g).collect();
    for g in listed {
        let row = &f.matrix()[f.source().face(g)?.0];
        if row.iter().sum::<u32>() != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

impl SurgeryFixture {
    pub fn verify(&self) -> Vec<InvariantCheck> {
        let check = |name, passed: Result<bool, CornersError>| InvariantCheck {
            name,
            passed: passed.unwrap_or(false),
        };
        let maps = [&self.pi2_1, &self.pi2_2, &self.pi3_12, &self.pi3_23, &self.pi3_13];
        vec![
            check("pi2_1_is_b_fibration", Ok(is_b_fibration(&self.pi2_1))),
            check("pi2_2_is_b_fibration", Ok(is_b_fibration(&self.pi2_2))),
            check("pi2_1_is_b_normal", Ok(is_b_normal(&self.pi2_1))),
            check(
                "pi2_1_rows",
                rows_match(
                    &self.pi2_1,
                    &[("ff_b", "ff"), ("ff_c", "ff"), ("Br2", "ff"), ("Br1", "tf"), ("tb", "tf")],
                ),
            ),
            check(
                "pi2_2_mirror_rows",
                rows_match(
                    &self.pi2_2,
                    &[("ff_b", "ff"), ("ff_c", "ff"), ("Br1", "ff"), ("Br2", "tf"), ("tb", "tf")],
                ),
            ),
            check("pi3_12_is_b_fibration", Ok(is_b_fibration(&self.pi3_12))),
            check("pi3_23_is_b_fibration", Ok(is_b_fibration(&self.pi3_23))),
            check("pi3_13_is_b_fibration", Ok(is_b_fibration(&self.pi3_13))),
            check(
                "pi3_13_pinned_rows",
                rows_match(
                    &self.pi3_13,
                    &[("fff_c", "ff_c"), ("C2", "ff_c"), ("T2", "ff_c"), ("ttb", "tb")],
                )
                .map(|ok| ok && self.pi3_13.preimage(self.x2.face("ff_c").unwrap()).len() == 3),
            ),
            check(
                "pi3_12_pinned_rows",
                rows_match(&self.pi3_12, &[("fff_c", "ff_c"), ("ttb", "tb")]),
            ),
            check(
                "pi3_23_pinned_rows",
                rows_match(&self.pi3_23, &[("fff_c", "ff_c"), ("ttb", "tb")]),
            ),
            check(
                "entries_in_0_1",
                Ok(maps
                    .iter()
                    .all(|f| f.matrix().iter().flatten().all(|&x| x <= 1))),
            ),
            check(
                "density_x2",
                Ok(self.density_x2.get("ff_b") == Some(&2)
                    && self.density_x2.get("ff_c") == Some(&3)
                    && ["Br1", "Br2", "tb"].iter().all(|f| self.density_x2.get(*f) == Some(&0))),
            ),
            check(
                "density_x3",
                Ok(self.density_x3.get("fff_b") == Some(&3) && self.density_x3.get("fff_c") == Some(&5)),
            ),
            check("omega_ff_exponent", Ok(self.omega_ff_exponent == 1)),
        ]
    }
}
