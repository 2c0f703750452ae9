use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{fixture, SurgeryError, SurgeryFixture};
use crate::corners::{
    extended_union, inf_order, pullback_family, pushforward_family, sum_sets, IndexFamily, IndexSet,
    IndexTerm, Order,
};
use crate::Rational;

/// Orders `(m, α, β)` of an operator in the cusp-surgery calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpOrders {
    pub m: Rational,
    pub alpha: Rational,
    pub beta: Rational,
}

impl OpOrders {
    pub fn new(m: impl Into<Rational>, alpha: impl Into<Rational>, beta: impl Into<Rational>) -> Self {
        OpOrders { m: m.into(), alpha: alpha.into(), beta: beta.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0, 0)
    }
}

impl fmt::Display for OpOrders {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.m, self.alpha, self.beta)
    }
}

fn two() -> Rational {
    Rational::from_integer(2)
}

/// Index family of the Schwartz kernel on the double space: only the cusp
/// front face and the temporal face carry terms.
pub fn kernel_index_family(fx: &SurgeryFixture, o: &OpOrders) -> IndexFamily {
    IndexFamily::from_labels(
        &fx.x2,
        [
            ("ff_c", IndexSet::shifted_naturals(-o.alpha - two())),
            ("tb", IndexSet::shifted_naturals(-o.beta)),
        ],
    )
    .expect("fixture has ff_c and tb")
}

fn add_density(family: &IndexFamily, density: &BTreeMap<String, u32>, sign: i64) -> IndexFamily {
    let space = family.space().clone();
    family.map(|id, set| {
        let e = density.get(space.label(id)).copied().unwrap_or(0);
        set.shift(Rational::from_integer(sign * i64::from(e)))
    })
}

fn leading(family: &IndexFamily, label: &str) -> Result<Rational, SurgeryError> {
    match inf_order(family.at(label)?) {
        Order::Finite(z) => Ok(z),
        Order::Infinite => Err(SurgeryError::EmptyLeadingOrder(label.to_string())),
    }
}

/// Intermediate families of the mapping-property pipeline.
#[derive(Debug, Clone)]
pub struct MappingTrace {
    pub pulled: IndexFamily,
    pub product: IndexFamily,
    pub weighted: IndexFamily,
    pub pushed: IndexFamily,
    pub result: IndexFamily,
    pub orders: (Rational, Rational),
}

pub fn mapping_trace(
    fx: &SurgeryFixture,
    o: &OpOrders,
    section: (Rational, Rational),
) -> Result<MappingTrace, SurgeryError> {
    let u = IndexFamily::from_labels(
        &fx.x1,
        [
            ("ff", IndexSet::shifted_naturals(section.0)),
            ("tf", IndexSet::shifted_naturals(section.1)),
        ],
    )?;
    let pulled = pullback_family(&fx.pi2_2, &u)?;
    let product = pulled.zip_with(&kernel_index_family(fx, o), sum_sets)?;
    let weighted = add_density(&product, &fx.density_x2, 1);
    let pushed = pushforward_family(&fx.pi2_1, &weighted)?;
    let ff = fx.x1.face("ff")?;
    let omega = Rational::from_integer(fx.omega_ff_exponent.into());
    let result = pushed.map(|id, set| if id == ff { set.shift(-omega) } else { set.clone() });
    let orders = (leading(&result, "ff")?, leading(&result, "tf")?);
    Ok(MappingTrace { pulled, product, weighted, pushed, result, orders })
}

/// Leading orders at `(ff, tf)` of `A u` for `u` with orders `section`.
pub fn mapping_orders(o: &OpOrders, section: (Rational, Rational)) -> Result<(Rational, Rational), SurgeryError> {
    Ok(mapping_trace(fixture(), o, section)?.orders)
}

/// Intermediate families of the composition pipeline.
#[derive(Debug, Clone)]
pub struct CompositionTrace {
    pub left: IndexFamily,
    pub right: IndexFamily,
    pub product: IndexFamily,
    pub weighted: IndexFamily,
    pub pushed: IndexFamily,
    pub normalized: IndexFamily,
    pub orders: OpOrders,
}

pub fn composition_trace(
    fx: &SurgeryFixture,
    a: &OpOrders,
    b: &OpOrders,
) -> Result<CompositionTrace, SurgeryError> {
    let left = pullback_family(&fx.pi3_12, &kernel_index_family(fx, a))?;
    let right = pullback_family(&fx.pi3_23, &kernel_index_family(fx, b))?;
    let product = left.zip_with(&right, sum_sets)?;
    let weighted = add_density(&product, &fx.density_x3, 1);
    let pushed = pushforward_family(&fx.pi3_13, &weighted)?;
    let normalized = add_density(&pushed, &fx.density_x2, -1);
    let orders = OpOrders {
        m: a.m + b.m,
        alpha: -leading(&normalized, "ff_c")? - two(),
        beta: -leading(&normalized, "tb")?,
    };
    Ok(CompositionTrace { left, right, product, weighted, pushed, normalized, orders })
}

/// Orders of `A ∘ B`.
pub fn composition_orders(a: &OpOrders, b: &OpOrders) -> Result<OpOrders, SurgeryError> {
    Ok(composition_trace(fixture(), a, b)?.orders)
}

/// `(−α + ℕ) ∪̄ (−β + ℕ)`, the index set of `t ↦ Tr A_t` at `t = 0`.
pub fn trace_index_set(alpha: Rational, beta: Rational) -> Result<IndexSet, SurgeryError> {
    if alpha >= -Rational::one() || beta > Rational::zero() {
        return Err(SurgeryError::TraceClassViolated { alpha, beta });
    }
    let fx = fixture();
    let restricted = IndexFamily::from_labels(
        &fx.x1,
        [
            ("ff", IndexSet::shifted_naturals(-alpha)),
            ("tf", IndexSet::shifted_naturals(-beta)),
        ],
    )?;
    let pushed = pushforward_family(&fx.pi_time, &restricted)?;
    Ok(pushed.at("{0}")?.clone())
}

/// Leading monomials `t^z log^k t` of the trace expansion.
pub fn trace_expansion_terms(alpha: Rational, beta: Rational) -> Result<Vec<IndexTerm>, SurgeryError> {
    let set = trace_index_set(alpha, beta)?;
    let (lo, hi) = if -alpha <= -beta { (-alpha, -beta) } else { (-beta, -alpha) };
    Ok(vec![IndexTerm::new(lo, 0), IndexTerm::new(hi, set.max_log_power(hi).unwrap_or(0))])
}

/// Orders of a parametrix of an elliptic operator with orders `o`.
pub fn parametrix_orders(o: &OpOrders) -> OpOrders {
    OpOrders { m: -o.m, alpha: -o.alpha, beta: -o.beta }
}

/// Convenience for the trace set: both summands present with a log on the
/// larger exponent exactly when the difference is an integer.
pub fn trace_set_closed_form(alpha: Rational, beta: Rational) -> IndexSet {
    extended_union(
        &IndexSet::shifted_naturals(-alpha),
        &IndexSet::shifted_naturals(-beta),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn kernel_families() {
        let fx = fixture();
        let k = kernel_index_family(fx, &OpOrders::new(1, 1, 0));
        assert_eq!(k.at("ff_c").unwrap(), &IndexSet::shifted_naturals(-3));
        assert_eq!(k.at("tb").unwrap(), &IndexSet::naturals());
        for f in ["ff_b", "Br1", "Br2"] {
            assert!(k.at(f).unwrap().is_empty());
        }
        let r = kernel_index_family(fx, &OpOrders::new(-1, -1, 0));
        assert_eq!(r.at("ff_c").unwrap(), &IndexSet::shifted_naturals(-1));
        let z = kernel_index_family(fx, &OpOrders::new(0, -2, 0));
        assert_eq!(z.at("ff_c").unwrap(), &IndexSet::naturals());
    }

    #[test]
    fn mapping_examples() {
        assert_eq!(mapping_orders(&OpOrders::new(1, 1, 0), (int(0), int(0))).unwrap(), (int(-1), int(0)));
        assert_eq!(
            mapping_orders(&OpOrders::zero(), (q(3, 7), q(-1, 2))).unwrap(),
            (q(3, 7), q(-1, 2))
        );
        assert_eq!(mapping_orders(&OpOrders::new(-1, -1, 0), (int(2), int(1))).unwrap(), (int(3), int(1)));
    }

    #[test]
    fn mapping_product_is_empty_off_kernel_faces() {
        let t = mapping_trace(fixture(), &OpOrders::new(1, q(1, 3), 2), (int(1), int(0))).unwrap();
        for f in ["ff_b", "Br1", "Br2"] {
            assert!(t.product.at(f).unwrap().is_empty(), "{f}");
        }
        assert!(!t.product.at("ff_c").unwrap().is_empty());
    }

    #[test]
    fn composition_examples() {
        let r = OpOrders::new(-1, -1, 0);
        assert_eq!(composition_orders(&r, &r).unwrap(), OpOrders::new(-2, -2, 0));
        assert_eq!(composition_orders(&OpOrders::zero(), &r).unwrap(), r);
        assert_eq!(
            composition_orders(&OpOrders::new(1, 1, 0), &r).unwrap(),
            OpOrders::zero()
        );
    }

    #[test]
    fn composition_product_lives_on_fff_c_and_ttb() {
        let t = composition_trace(fixture(), &OpOrders::new(1, 2, 3), &OpOrders::new(0, q(1, 2), -1)).unwrap();
        let nonempty: Vec<&str> = t
            .product
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(id, _)| t.product.space().label(id))
            .collect();
        assert_eq!(nonempty, vec!["fff_c", "ttb"]);
    }

    #[test]
    fn trace_sets() {
        let s = trace_index_set(int(-2), int(0)).unwrap();
        assert_eq!(s.generators(), &[IndexTerm::new(0, 0), IndexTerm::new(2, 1)]);
        let s = trace_index_set(int(-3), int(0)).unwrap();
        assert_eq!(s.generators(), &[IndexTerm::new(0, 0), IndexTerm::new(3, 1)]);
        let s = trace_index_set(q(-5, 2), int(0)).unwrap();
        assert_eq!(s.generators(), &[IndexTerm::new(0, 0), IndexTerm::new(q(5, 2), 0)]);
        assert_eq!(s, trace_set_closed_form(q(-5, 2), int(0)));
    }

    #[test]
    fn trace_class_conditions() {
        assert!(matches!(
            trace_index_set(int(-1), int(0)),
            Err(SurgeryError::TraceClassViolated { .. })
        ));
        assert!(trace_index_set(int(-2), q(1, 2)).is_err());
        assert!(trace_index_set(q(-3, 2), int(0)).is_ok());
    }

    #[test]
    fn expansion_terms() {
        assert_eq!(
            trace_expansion_terms(int(-2), int(0)).unwrap(),
            vec![IndexTerm::new(0, 0), IndexTerm::new(2, 1)]
        );
        assert_eq!(
            trace_expansion_terms(int(-4), int(0)).unwrap(),
            vec![IndexTerm::new(0, 0), IndexTerm::new(4, 1)]
        );
        assert_eq!(
            trace_expansion_terms(q(-3, 2), q(-1, 2)).unwrap(),
            vec![IndexTerm::new(q(1, 2), 0), IndexTerm::new(q(3, 2), 1)]
        );
        assert_eq!(
            trace_expansion_terms(q(-7, 3), int(-1)).unwrap(),
            vec![IndexTerm::new(1, 0), IndexTerm::new(q(7, 3), 0)]
        );
    }

    #[test]
    fn parametrix_inverts() {
        let o = OpOrders::new(1, 1, 0);
        assert_eq!(parametrix_orders(&o), OpOrders::new(-1, -1, 0));
        assert_eq!(parametrix_orders(&OpOrders::zero()), OpOrders::zero());
        let o = OpOrders::new(q(3, 2), -4, q(1, 5));
        assert_eq!(composition_orders(&o, &parametrix_orders(&o)).unwrap(), OpOrders::zero());
    }
}
