//! Slow, direct reference implementations used to check the `sdfseg` crate.
//!
//! Nothing here depends on `sdfseg`; inputs are plain row-major slices.

/// Squared distance from every pixel to the nearest 0 pixel by scanning all pairs.
/// `None` when the mask has no 0 pixel.
pub fn brute_squared_edt(width: usize, height: usize, mask: &[u8]) -> Option<Vec<u64>> {
    let zeros: Vec<(i64, i64)> = (0..height * width)
        .filter(|&i| mask[i] == 0)
        .map(|i| ((i / width) as i64, (i % width) as i64))
        .collect();
    if zeros.is_empty() {
        return None;
    }
    Some(
        (0..height * width)
            .map(|i| {
                let (r, c) = ((i / width) as i64, (i % width) as i64);
                zeros
                    .iter()
                    .map(|&(zr, zc)| ((r - zr) * (r - zr) + (c - zc) * (c - zc)) as u64)
                    .min()
                    .unwrap()
            })
            .collect(),
    )
}

/// Signed distance with the half-pixel offset: `+(d - 0.5)` inside, `-(d - 0.5)`
/// outside, `d` the distance to the nearest opposite-class pixel centre.
/// `None` for single-class masks.
pub fn brute_sdf(width: usize, height: usize, mask: &[u8]) -> Option<Vec<f64>> {
    let inverted: Vec<u8> = mask.iter().map(|&v| 1 - v).collect();
    let to_background = brute_squared_edt(width, height, mask)?;
    let to_foreground = brute_squared_edt(width, height, &inverted)?;
    Some(
        mask.iter()
            .enumerate()
            .map(|(i, &m)| {
                if m == 1 {
                    (to_background[i] as f64).sqrt() - 0.5
                } else {
                    0.5 - (to_foreground[i] as f64).sqrt()
                }
            })
            .collect(),
    )
}

pub fn brute_directed(a: &[(usize, usize)], b: &[(usize, usize)]) -> Vec<f64> {
    a.iter()
        .map(|&(ra, ca)| {
            b.iter()
                .map(|&(rb, cb)| {
                    let dr = ra as f64 - rb as f64;
                    let dc = ca as f64 - cb as f64;
                    (dr * dr + dc * dc).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub fn brute_hausdorff(a: &[(usize, usize)], b: &[(usize, usize)]) -> f64 {
    let ab = brute_directed(a, b).into_iter().fold(0.0, f64::max);
    let ba = brute_directed(b, a).into_iter().fold(0.0, f64::max);
    ab.max(ba)
}

pub fn brute_mhd(a: &[(usize, usize)], b: &[(usize, usize)]) -> f64 {
    let ab: f64 = brute_directed(a, b).into_iter().sum();
    let ba: f64 = brute_directed(b, a).into_iter().sum();
    ab + ba
}

/// 4-connected components via union-find, relabeled 1.. by first row-major
/// appearance of each root. Returns `(labels, count)`.
pub fn union_find_components(width: usize, height: usize, mask: &[u8]) -> (Vec<u32>, usize) {
    let n = width * height;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        if mask[i] == 0 {
            continue;
        }
        let (r, c) = (i / width, i % width);
        if c + 1 < width && mask[i + 1] == 1 {
            let (a, b) = (find(&mut parent, i), find(&mut parent, i + 1));
            parent[a.max(b)] = a.min(b);
        }
        if r + 1 < height && mask[i + width] == 1 {
            let (a, b) = (find(&mut parent, i), find(&mut parent, i + width));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label_of_root = vec![0u32; n];
    let mut labels = vec![0u32; n];
    let mut count = 0;
    for i in 0..n {
        if mask[i] == 0 {
            continue;
        }
        let root = find(&mut parent, i);
        if label_of_root[root] == 0 {
            count += 1;
            label_of_root[root] = count as u32;
        }
        labels[i] = label_of_root[root];
    }
    (labels, count)
}

fn sig(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn sig_complement(t: f64) -> f64 {
    1.0 / (1.0 + t.exp())
}

/// Double-double accumulator built on Knuth's two-sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (x - bb);
        let lo = self.lo + err;
        self.hi = s + lo;
        self.lo = lo - (self.hi - s);
    }

    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.add(a.mul_add(b, -p));
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    pub fn sub(&self, other: &DoubleDouble) -> f64 {
        (self.hi - other.hi) + (self.lo - other.lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaiveBreakdown {
    pub lmhd: f64,
    pub rmhd: f64,
    pub lse: f64,
    pub ce: f64,
    pub total: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct NaiveLoss {
    pub alpha: f64,
    pub beta: f64,
    /// `[lmhd, rmhd, lse, ce]`.
    pub weights: [f64; 4],
    /// Divide the squared-error and cross-entropy sums by the pixel count.
    pub mean_pixel_terms: bool,
}

impl NaiveLoss {
    fn tanh(&self, z: f64) -> f64 {
        2.0 * sig(self.alpha * z + self.beta) - 1.0
    }

    fn boundary(&self, z: f64) -> f64 {
        sig(self.alpha * z + self.beta) * sig(-self.alpha * z + self.beta)
    }

    fn ce(&self, z: f64, s: u8) -> f64 {
        let t = self.alpha * z + self.beta;
        let p_in = sig(t).clamp(1e-12, 1.0);
        let p_out = sig_complement(t).clamp(1e-12, 1.0);
        let s = s as f64;
        -(s * p_in.ln() + (1.0 - s) * p_out.ln())
    }

    /// Per-term sums in extended precision (before the optional mean).
    fn sums(&self, pred: &[f64], gt: &[f64], s: &[u8]) -> [DoubleDouble; 4] {
        assert_eq!(pred.len(), gt.len());
        assert_eq!(pred.len(), s.len());
        let mut out = [DoubleDouble::default(); 4];
        for i in 0..pred.len() {
            out[0].add(self.boundary(gt[i]) * self.tanh(pred[i]).abs());
            out[1].add(self.boundary(pred[i]) * self.tanh(gt[i]).abs());
            let d = self.tanh(pred[i]) - self.tanh(gt[i]);
            out[2].add(d * d);
            out[3].add(self.ce(pred[i], s[i]));
        }
        out
    }

    pub fn evaluate(&self, pred: &[f64], gt: &[f64], s: &[u8]) -> NaiveBreakdown {
        let sums = self.sums(pred, gt, s);
        let n = if self.mean_pixel_terms {
            pred.len() as f64
        } else {
            1.0
        };
        let lmhd = sums[0].value();
        let rmhd = sums[1].value();
        let lse = sums[2].value() / n;
        let ce = sums[3].value() / n;
        let w = self.weights;
        NaiveBreakdown {
            lmhd,
            rmhd,
            lse,
            ce,
            total: w[0] * lmhd + w[1] * rmhd + w[2] * lse + w[3] * ce,
        }
    }

    /// Weighted total in double-double precision, for finite differences.
    pub fn total_dd(&self, pred: &[f64], gt: &[f64], s: &[u8]) -> DoubleDouble {
        let sums = self.sums(pred, gt, s);
        let n = if self.mean_pixel_terms {
            pred.len() as f64
        } else {
            1.0
        };
        let scale = [1.0, 1.0, 1.0 / n, 1.0 / n];
        let mut total = DoubleDouble::default();
        for k in 0..4 {
            let w = self.weights[k] * scale[k];
            total.add_product(w, sums[k].hi);
            total.add(w * sums[k].lo);
        }
        total
    }
}

/// Fourth-order central-difference gradient of the total with respect to every
/// pixel of `pred`, then `alpha`, then `beta`.
pub fn fd_gradient(
    loss: &NaiveLoss,
    pred: &[f64],
    gt: &[f64],
    s: &[u8],
    h: f64,
) -> (Vec<f64>, f64, f64) {
    let stencil = |f: &mut dyn FnMut(f64) -> DoubleDouble, x: f64| {
        let near = f(x + h).sub(&f(x - h));
        let far = f(x + 2.0 * h).sub(&f(x - 2.0 * h));
        (8.0 * near - far) / (12.0 * h)
    };
    let mut x = pred.to_vec();
    let mut d_phi = Vec::with_capacity(pred.len());
    for i in 0..pred.len() {
        let base = x[i];
        let d = stencil(
            &mut |v| {
                x[i] = v;
                loss.total_dd(&x, gt, s)
            },
            base,
        );
        x[i] = base;
        d_phi.push(d);
    }
    let at = |alpha: f64, beta: f64| {
        NaiveLoss {
            alpha,
            beta,
            ..*loss
        }
        .total_dd(pred, gt, s)
    };
    let d_alpha = stencil(&mut |a| at(a, loss.beta), loss.alpha);
    let d_beta = stencil(&mut |b| at(loss.alpha, b), loss.beta);
    (d_phi, d_alpha, d_beta)
}
