//! Bilinear constructions for matrix multiplication and the improved
//! entangled polynomial code built on them.
//!
//! A construction of rank `R` for shape `(p, m, n)` is a triple of tensors
//! `a ∈ F^{R×p×m}`, `b ∈ F^{R×p×n}`, `c ∈ F^{R×m×n}` such that for every
//! `A ∈ F^{p×m}`, `B ∈ F^{p×n}` and every `j < m`, `k < n`:
//!
//! ```text
//! Σ_i c[i][j][k] · (Σ A[j'][k'] a[i][j'][k']) · (Σ B[j''][k''] b[i][j''][k'']) = Σ_l A[l][j] B[l][k]
//! ```
//!
//! i.e. the `R` products of linear forms recombine into `AᵀB`. Entries are
//! kept as small signed integers and mapped into a field when used.

mod improved;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use improved::{ElementwiseProductCode, ImprovedEntangledCode};

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Largest rank `tensor_power` will produce.
pub const MAX_RANK: u64 = 1_000_000;
/// Largest total tensor entry count `tensor_power` will produce.
const MAX_ENTRIES: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearConstruction {
    name: String,
    p: usize,
    m: usize,
    n: usize,
    rank: usize,
    a: Vec<i64>,
    b: Vec<i64>,
    c: Vec<i64>,
}

/// The first basis pair on which a construction disagrees with matrix
/// multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisViolation {
    /// `(j', k')`: the nonzero entry of the `A` basis matrix.
    pub a_entry: (usize, usize),
    /// `(j'', k'')`: the nonzero entry of the `B` basis matrix.
    pub b_entry: (usize, usize),
    /// `(j, k)`: the output entry that comes out wrong.
    pub output: (usize, usize),
    pub expected: u64,
    pub found: u64,
}

impl fmt::Display for BasisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A=e{:?}, B=e{:?}: output {:?} is {} but should be {}",
            self.a_entry, self.b_entry, self.output, self.found, self.expected
        )
    }
}

impl BilinearConstruction {
    /// Builds a construction from flat tensors laid out `[i][row][col]`.
    pub fn new(
        name: impl Into<String>,
        (p, m, n): (usize, usize, usize),
        rank: usize,
        a: Vec<i64>,
        b: Vec<i64>,
        c: Vec<i64>,
    ) -> Result<Self> {
        if p == 0 || m == 0 || n == 0 {
            return Err(Error::InvalidConstruction(
                "p, m, n must be positive".into(),
            ));
        }
        for (label, tensor, len) in [
            ("a", &a, rank * p * m),
            ("b", &b, rank * p * n),
            ("c", &c, rank * m * n),
        ] {
            if tensor.len() != len {
                return Err(Error::InvalidConstruction(format!(
                    "tensor {label} has {} entries, expected {len}",
                    tensor.len()
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            p,
            m,
            n,
            rank,
            a,
            b,
            c,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `(p, m, n)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.p, self.m, self.n)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize, k: usize) -> i64 {
        self.a[(i * self.p + j) * self.m + k]
    }

    #[inline]
    pub fn b(&self, i: usize, j: usize, k: usize) -> i64 {
        self.b[(i * self.p + j) * self.n + k]
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> i64 {
        self.c[(i * self.m + j) * self.n + k]
    }

    #[cfg(test)]
    pub(crate) fn c_mut(&mut self, i: usize, j: usize, k: usize) -> &mut i64 {
        &mut self.c[(i * self.m + j) * self.n + k]
    }

    /// The trivial rank-`pmn` construction: one product per
    /// `(l, j, k)` computing `A[l][j]·B[l][k]`.
    pub fn standard(p: usize, m: usize, n: usize) -> Result<Self> {
        let rank = p * m * n;
        let mut a = vec![0; rank * p * m];
        let mut b = vec![0; rank * p * n];
        let mut c = vec![0; rank * m * n];
        for l in 0..p {
            for j in 0..m {
                for k in 0..n {
                    let i = (l * m + j) * n + k;
                    a[(i * p + l) * m + j] = 1;
                    b[(i * p + l) * n + k] = 1;
                    c[(i * m + j) * n + k] = 1;
                }
            }
        }
        Self::new(format!("standard-{p}-{m}-{n}"), (p, m, n), rank, a, b, c)
    }

    /// Strassen's seven products for `2 × 2` blocks, written for `AᵀB`.
    pub fn strassen() -> Self {
        // X = Aᵀ, so X[u][v] is A[v][u]; each row lists
        // (a over A00 A01 A10 A11), (b over B00 B01 B10 B11), (c over C00 C01 C10 C11).
        #[rustfmt::skip]
        const PRODUCTS: [([i64; 4], [i64; 4], [i64; 4]); 7] = [
            // (X11 + X22)(Y11 + Y22)
            ([1, 0, 0, 1], [1, 0, 0, 1], [1, 0, 0, 1]),
            // (X21 + X22) Y11
            ([0, 1, 0, 1], [1, 0, 0, 0], [0, 0, 1, -1]),
            // X11 (Y12 − Y22)
            ([1, 0, 0, 0], [0, 1, 0, -1], [0, 1, 0, 1]),
            // X22 (Y21 − Y11)
            ([0, 0, 0, 1], [-1, 0, 1, 0], [1, 0, 1, 0]),
            // (X11 + X12) Y22
            ([1, 0, 1, 0], [0, 0, 0, 1], [-1, 1, 0, 0]),
            // (X21 − X11)(Y11 + Y12)
            ([-1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 0, 1]),
            // (X12 − X22)(Y21 + Y22)
            ([0, 0, 1, -1], [0, 0, 1, 1], [1, 0, 0, 0]),
        ];
        let mut a = Vec::with_capacity(28);
        let mut b = Vec::with_capacity(28);
        let mut c = Vec::with_capacity(28);
        for (ai, bi, ci) in PRODUCTS {
            a.extend(ai);
            b.extend(bi);
            c.extend(ci);
        }
        Self::new("strassen", (2, 2, 2), 7, a, b, c).expect("static tensor sizes")
    }

    /// Kronecker composition: shape multiplies entry-wise, rank multiplies.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let rank = self.rank as u128 * other.rank as u128;
        let (p, m, n) = (self.p * other.p, self.m * other.m, self.n * other.n);
        let entries = rank * (p * m + p * n + m * n) as u128;
        if rank > MAX_RANK as u128 || entries > MAX_ENTRIES {
            return Err(Error::ConstructionTooLarge(
                rank.min(u64::MAX as u128) as u64
            ));
        }
        let rank = rank as usize;
        let kron = |x: &[i64],
                    y: &[i64],
                    (r1, s1, t1): (usize, usize, usize),
                    (r2, s2, t2): (usize, usize, usize)| {
            let (s, t) = (s1 * s2, t1 * t2);
            let mut out = vec![0i64; r1 * r2 * s * t];
            for i1 in 0..r1 {
                for j1 in 0..s1 {
                    for k1 in 0..t1 {
                        let v1 = x[(i1 * s1 + j1) * t1 + k1];
                        if v1 == 0 {
                            continue;
                        }
                        for i2 in 0..r2 {
                            for j2 in 0..s2 {
                                for k2 in 0..t2 {
                                    let v2 = y[(i2 * s2 + j2) * t2 + k2];
                                    if v2 == 0 {
                                        continue;
                                    }
                                    let i = i1 * r2 + i2;
                                    let j = j1 * s2 + j2;
                                    let k = k1 * t2 + k2;
                                    out[(i * s + j) * t + k] = v1 * v2;
                                }
                            }
                        }
                    }
                }
            }
            out
        };
        let (r1, r2) = (self.rank, other.rank);
        let a = kron(
            &self.a,
            &other.a,
            (r1, self.p, self.m),
            (r2, other.p, other.m),
        );
        let b = kron(
            &self.b,
            &other.b,
            (r1, self.p, self.n),
            (r2, other.p, other.n),
        );
        let c = kron(
            &self.c,
            &other.c,
            (r1, self.m, self.n),
            (r2, other.m, other.n),
        );
        Self::new(
            format!("{}x{}", self.name, other.name),
            (p, m, n),
            rank,
            a,
            b,
            c,
        )
    }

    /// `k`-fold Kronecker power: shape `(p^k, m^k, n^k)`, rank `R^k`.
    pub fn tensor_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConstruction(
                "tensor power must be at least 1".into(),
            ));
        }
        if (self.rank as u128).pow(k) > MAX_RANK as u128 {
            return Err(Error::ConstructionTooLarge(
                (self.rank as u64).saturating_pow(k),
            ));
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.compose(self)?;
        }
        out.name = if k == 1 {
            self.name.clone()
        } else {
            format!("{}^{k}", self.name)
        };
        Ok(out)
    }

    /// Checks the defining identity on every pair of basis inputs
    /// `A = e_{j'k'}`, `B = e_{j''k''}` and every output `(j, k)` in `field`.
    pub fn validate(&self, field: PrimeField) -> std::result::Result<(), BasisViolation> {
        let (p, m, n) = (self.p, self.m, self.n);
        // acc[((j'·m + k')·pn + j''·n + k'')·mn + j·n + k]
        let (pm, pn, mn) = (p * m, p * n, m * n);
        let mut acc = vec![0u64; pm * pn * mn];
        for i in 0..self.rank {
            let nz = |t: &[i64], len: usize| -> Vec<(usize, u64)> {
                t[i * len..(i + 1) * len]
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(idx, &v)| (idx, field.reduce_i64(v)))
                    .collect()
            };
            let (an, bn, cn) = (nz(&self.a, pm), nz(&self.b, pn), nz(&self.c, mn));
            for &(ai, av) in &an {
                for &(bi, bv) in &bn {
                    let ab = field.mul(av, bv);
                    let base = (ai * pn + bi) * mn;
                    for &(ci, cv) in &cn {
                        acc[base + ci] = field.add(acc[base + ci], field.mul(ab, cv));
                    }
                }
            }
        }
        for jp in 0..p {
            for kp in 0..m {
                for jpp in 0..p {
                    for kpp in 0..n {
                        for j in 0..m {
                            for k in 0..n {
                                let expected = u64::from(jp == jpp && kp == j && kpp == k);
                                let found =
                                    acc[((jp * m + kp) * pn + jpp * n + kpp) * mn + j * n + k];
                                if found != expected {
                                    return Err(BasisViolation {
                                        a_entry: (jp, kp),
                                        b_entry: (jpp, kpp),
                                        output: (j, k),
                                        expected,
                                        found,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Looks up a built-in construction: `strassen`, `strassen^k`, or
    /// `standard-p-m-n`.
    pub fn named(name: &str) -> Result<Self> {
        if name == "strassen" {
            return Ok(Self::strassen());
        }
        if let Some(k) = name.strip_prefix("strassen^") {
            let k = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad power in {name:?}")))?;
            return Self::strassen().tensor_power(k);
        }
        if let Some(dims) = name.strip_prefix("standard-") {
            let dims: Vec<usize> = dims
                .split('-')
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad shape in {name:?}")))?;
            if let [p, m, n] = dims[..] {
                return Self::standard(p, m, n);
            }
        }
        Err(Error::Parse(format!("unknown construction {name:?}")))
    }

    /// A built-in name, or else a path to a JSON construction file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::named(name_or_path) {
            Ok(bc) => Ok(bc),
            Err(_) if Path::new(name_or_path).exists() => Self::load(name_or_path),
            Err(e) => Err(e),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConstructionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ConstructionFile::from(self)).expect("plain data serializes")
    }
}

/// On-disk layout: nested `[i][row][col]` integer arrays with centered
/// representatives (`-1` rather than `q − 1`).
#[derive(Serialize, Deserialize)]
struct ConstructionFile {
    #[serde(default)]
    name: Option<String>,
    p: usize,
    m: usize,
    n: usize,
    #[serde(rename = "R")]
    rank: usize,
    a: Vec<Vec<Vec<i64>>>,
    b: Vec<Vec<Vec<i64>>>,
    c: Vec<Vec<Vec<i64>>>,
}

fn flatten(label: &str, t: Vec<Vec<Vec<i64>>>, dims: (usize, usize, usize)) -> Result<Vec<i64>> {
    let bad = || Error::InvalidConstruction(format!("tensor {label} is not {dims:?}"));
    if t.len() != dims.0 {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(dims.0 * dims.1 * dims.2);
    for slice in t {
        if slice.len() != dims.1 {
            return Err(bad());
        }
        for row in slice {
            if row.len() != dims.2 {
                return Err(bad());
            }
            out.extend(row);
        }
    }
    Ok(out)
}

impl TryFrom<ConstructionFile> for BilinearConstruction {
    type Error = Error;

    fn try_from(f: ConstructionFile) -> Result<Self> {
        let a = flatten("a", f.a, (f.rank, f.p, f.m))?;
        let b = flatten("b", f.b, (f.rank, f.p, f.n))?;
        let c = flatten("c", f.c, (f.rank, f.m, f.n))?;
        let name = f
            .name
            .unwrap_or_else(|| format!("custom-{}-{}-{}", f.p, f.m, f.n));
        Self::new(name, (f.p, f.m, f.n), f.rank, a, b, c)
    }
}

impl From<&BilinearConstruction> for ConstructionFile {
    fn from(bc: &BilinearConstruction) -> Self {
        let nest = |t: &[i64], rows: usize, cols: usize| -> Vec<Vec<Vec<i64>>> {
            t.chunks(rows * cols)
                .map(|s| s.chunks(cols).map(<[i64]>::to_vec).collect())
                .collect()
        };
        Self {
            name: Some(bc.name.clone()),
            p: bc.p,
            m: bc.m,
            n: bc.n,
            rank: bc.rank,
            a: nest(&bc.a, bc.p, bc.m),
            b: nest(&bc.b, bc.p, bc.n),
            c: nest(&bc.c, bc.m, bc.n),
        }
    }
}
