use super::operator::SymTridiagonal;
use super::LabError;

const BISECTION_CAP: usize = 2000;
const INVERSE_ITERATIONS: usize = 8;
const CLUSTER_GAP: f64 = 1e-3;

struct Sturm<'a> {
    t: &'a SymTridiagonal,
    off2: Vec<f64>,
    pivmin: f64,
}

impl<'a> Sturm<'a> {
    fn new(t: &'a SymTridiagonal) -> Self {
        let off2: Vec<f64> = t.off.iter().map(|e| e * e).collect();
        let max2 = off2.iter().copied().fold(1.0, f64::max);
        Sturm { t, off2, pivmin: f64::MIN_POSITIVE * max2 }
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let d = &self.t.diag;
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..d.len() {
            q = if i == 0 { d[0] - x } else { d[i] - x - self.off2[i - 1] / q };
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            count += usize::from(q < 0.0);
        }
        count
    }

    fn gershgorin_lower(&self) -> f64 {
        let n = self.t.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.t.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.t.off[i].abs() } else { 0.0 };
                self.t.diag[i] - left - right
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Lowest `count` eigenvalues, ascending, each to absolute accuracy `tol`.
pub fn eigen_lowest(t: &SymTridiagonal, count: usize, tol: f64) -> Result<Vec<f64>, LabError> {
    if count > t.dim() {
        return Err(LabError::InvalidParams(format!(
            "asked for {count} eigenvalues of a {}x{} matrix",
            t.dim(),
            t.dim()
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if !(tol > 0.0) {
        return Err(LabError::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    let sturm = Sturm::new(t);
    let floor = sturm.gershgorin_lower() - tol;
    let mut width = floor.abs().max(1.0);
    let mut ceiling = floor + width;
    while sturm.count_below(ceiling) < count {
        width *= 2.0;
        ceiling = floor + width;
    }

    let mut lo = vec![floor; count];
    let mut hi = vec![ceiling; count];
    let mut values = Vec::with_capacity(count);
    for j in 0..count {
        let (mut a, mut b) = (lo[j], hi[j]);
        let mut steps = 0;
        loop {
            let mid = 0.5 * (a + b);
            if b - a <= tol || mid <= a || mid >= b {
                break;
            }
            steps += 1;
            if steps > BISECTION_CAP {
                return Err(LabError::NonConvergence { index: j });
            }
            let c = sturm.count_below(mid);
            if c > j {
                b = mid;
            } else {
                a = mid;
            }
            for i in j + 1..count {
                if c > i {
                    hi[i] = hi[i].min(mid);
                } else {
                    lo[i] = lo[i].max(mid);
                }
            }
        }
        values.push(0.5 * (a + b));
    }
    Ok(values)
}

/// Eigenpairs for the lowest `count` eigenvalues; vectors satisfy `Σ v_i² h = 1`.
pub fn eigen_pairs(
    t: &SymTridiagonal,
    count: usize,
    tol: f64,
    h: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), LabError> {
    let values = eigen_lowest(t, count, tol)?;
    let vectors = eigen_vectors(t, &values, h)?;
    Ok((values, vectors))
}

/// Inverse-iteration eigenvectors for ascending eigenvalues `values`.
pub fn eigen_vectors(t: &SymTridiagonal, values: &[f64], h: f64) -> Result<Vec<Vec<f64>>, LabError> {
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (j, &mu) in values.iter().enumerate() {
        let cluster: Vec<&Vec<f64>> = (0..j)
            .filter(|&i| (values[i] - mu).abs() <= CLUSTER_GAP * mu.abs().max(1.0))
            .map(|i| &vectors[i])
            .collect();
        let mut v = inverse_iteration(t, mu, j, &cluster)?;
        let scale = 1.0 / h.sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
        vectors.push(v);
    }
    Ok(vectors)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn start_vector(n: usize, index: usize) -> Vec<f64> {
    let phase = 0.618_033_988_749_894_9 * (index as f64 + 1.0);
    (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.754_877_666_246_692_8 + phase).fract())
        .collect()
}

fn inverse_iteration(
    t: &SymTridiagonal,
    mu: f64,
    index: usize,
    cluster: &[&Vec<f64>],
) -> Result<Vec<f64>, LabError> {
    let n = t.dim();
    let lu = TridiagonalLu::factor(t, mu);
    let mut v = start_vector(n, index);
    let scale = t.diag.iter().chain(&t.off).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let mut settled = false;
    for _ in 0..INVERSE_ITERATIONS {
        lu.solve(&mut v);
        for q in cluster {
            let qq: f64 = q.iter().map(|x| x * x).sum();
            let dot: f64 = v.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
            let c = dot / qq;
            v.iter_mut().zip(q.iter()).for_each(|(a, b)| *a -= c * b);
        }
        let nv = norm(&v);
        if !(nv > 0.0) || !nv.is_finite() {
            return Err(LabError::NonConvergence { index });
        }
        v.iter_mut().for_each(|x| *x /= nv);
        if settled {
            break;
        }
        let tv = t.matvec(&v);
        let residual = norm(&tv.iter().zip(&v).map(|(a, b)| a - mu * b).collect::<Vec<_>>());
        settled = residual <= 1e-12 * scale;
    }
    let reference = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * reference) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(v)
}

/// LU factorisation with partial pivoting of `T - σI`.
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(t: &SymTridiagonal, sigma: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - sigma).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let tiny = f64::EPSILON
            * t.diag.iter().chain(&t.off).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        for x in d.iter_mut() {
            if x.abs() < tiny {
                *x = if *x < 0.0 { -tiny } else { tiny };
            }
        }
        TridiagonalLu { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
