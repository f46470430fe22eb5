//! Integer vectors and matrices on `V = ℝ³`, the orbit `s_j = Sʲ s₀` of the
//! multiplication-by-σ matrix and its adjoint orbit `s*_j`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// An exact integer 3-vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntVec3(pub [BigInt; 3]);

impl IntVec3 {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        IntVec3([x.into(), y.into(), z.into()])
    }

    pub fn zero() -> Self {
        IntVec3::default()
    }

    pub fn unit(i: usize) -> Self {
        let mut v = IntVec3::zero();
        v.0[i] = BigInt::one();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVec3) -> BigInt {
        dot(self, other)
    }

    pub fn norm2(&self) -> BigInt {
        dot(self, self)
    }

    pub fn scale(&self, k: &BigInt) -> IntVec3 {
        IntVec3(std::array::from_fn(|i| &self.0[i] * k))
    }

    pub fn to_f64(&self) -> [f64; 3] {
        use num_traits::ToPrimitive;
        std::array::from_fn(|i| self.0[i].to_f64().unwrap_or(f64::NAN))
    }
}

impl From<[i64; 3]> for IntVec3 {
    fn from(v: [i64; 3]) -> Self {
        IntVec3::new(v[0], v[1], v[2])
    }
}

impl Index<usize> for IntVec3 {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl fmt::Display for IntVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for &IntVec3 {
    type Output = IntVec3;
    fn add(self, rhs: &IntVec3) -> IntVec3 {
        IntVec3(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
}

impl Sub for &IntVec3 {
    type Output = IntVec3;
    fn sub(self, rhs: &IntVec3) -> IntVec3 {
        IntVec3(std::array::from_fn(|i| &self.0[i] - &rhs.0[i]))
    }
}

impl Neg for &IntVec3 {
    type Output = IntVec3;
    fn neg(self) -> IntVec3 {
        IntVec3(std::array::from_fn(|i| -&self.0[i]))
    }
}

pub fn dot(u: &IntVec3, v: &IntVec3) -> BigInt {
    &u.0[0] * &v.0[0] + &u.0[1] * &v.0[1] + &u.0[2] * &v.0[2]
}

pub fn cross(u: &IntVec3, v: &IntVec3) -> IntVec3 {
    let [a, b, c] = &u.0;
    let [d, e, f] = &v.0;
    IntVec3([b * f - c * e, c * d - a * f, a * e - b * d])
}

/// Determinant of the matrix with columns `u, v, w`.
pub fn det3(u: &IntVec3, v: &IntVec3, w: &IntVec3) -> BigInt {
    dot(u, &cross(v, w))
}

/// An exact integer 3×3 matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMat3(pub [[BigInt; 3]; 3]);

impl IntMat3 {
    pub fn from_rows(rows: [[i64; 3]; 3]) -> Self {
        IntMat3(rows.map(|r| r.map(BigInt::from)))
    }

    pub fn identity() -> Self {
        Self::from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    /// Multiplication by σ in `(ρ, 1, σ)` coordinates.
    pub fn s() -> Self {
        Self::from_rows([[0, 0, 1], [1, 0, -3], [0, 1, -3]])
    }

    pub fn s_inv() -> Self {
        Self::from_rows([[3, 1, 0], [3, 0, 1], [1, 0, 0]])
    }

    /// The adjoint `S*`, satisfying `⟨S*u, v⟩ = ⟨u, Sv⟩`.
    pub fn s_star() -> Self {
        Self::from_rows([[0, 1, 0], [0, 0, 1], [1, -3, -3]])
    }

    pub fn s_star_inv() -> Self {
        Self::from_rows([[3, 3, 1], [1, 0, 0], [0, 1, 0]])
    }

    /// Carries `s_j` to `s*_j`.
    pub fn t() -> Self {
        Self::from_rows([[3, 1, 0], [1, 0, 0], [0, 0, 1]])
    }

    pub fn apply(&self, v: &IntVec3) -> IntVec3 {
        IntVec3(std::array::from_fn(|i| {
            let r = &self.0[i];
            &r[0] * &v.0[0] + &r[1] * &v.0[1] + &r[2] * &v.0[2]
        }))
    }

    pub fn transpose(&self) -> IntMat3 {
        IntMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].clone())
        }))
    }

    pub fn mul(&self, other: &IntMat3) -> IntMat3 {
        IntMat3(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| &self.0[i][k] * &other.0[k][j]).sum())
        }))
    }

    pub fn det(&self) -> BigInt {
        let col = |j: usize| IntVec3(std::array::from_fn(|i| self.0[i][j].clone()));
        det3(&col(0), &col(1), &col(2))
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, mut e: u32) -> IntMat3 {
        let mut base = self.clone();
        let mut acc = IntMat3::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `S^j` for any integer `j`, as an explicit matrix.
    pub fn s_power(j: i64) -> IntMat3 {
        if j >= 0 {
            Self::s().pow(j as u32)
        } else {
            Self::s_inv().pow(j.unsigned_abs() as u32)
        }
    }
}

impl Mul<&IntVec3> for &IntMat3 {
    type Output = IntVec3;
    fn mul(self, v: &IntVec3) -> IntVec3 {
        self.apply(v)
    }
}

/// A memoized two-sided orbit `v_{j+1} = F v_j`, `v_{j−1} = B v_j`.
struct Orbit {
    forward: IntMat3,
    backward: IntMat3,
    tables: RwLock<OrbitTables>,
}

struct OrbitTables {
    /// `v_0, v_1, ...`
    nonneg: Vec<IntVec3>,
    /// `v_{−1}, v_{−2}, ...`
    neg: Vec<IntVec3>,
}

impl Orbit {
    fn new(forward: IntMat3, backward: IntMat3, seed: IntVec3) -> Self {
        let before = backward.apply(&seed);
        Orbit {
            forward,
            backward,
            tables: RwLock::new(OrbitTables {
                nonneg: vec![seed],
                neg: vec![before],
            }),
        }
    }

    fn get(&self, j: i64) -> IntVec3 {
        {
            let t = self.tables.read().expect("orbit table poisoned");
            if let Some(v) = t.lookup(j) {
                return v.clone();
            }
        }
        let mut t = self.tables.write().expect("orbit table poisoned");
        if j >= 0 {
            while t.nonneg.len() <= j as usize {
                let next = self.forward.apply(t.nonneg.last().expect("seeded"));
                t.nonneg.push(next);
            }
        } else {
            let idx = (-j - 1) as usize;
            while t.neg.len() <= idx {
                let next = self.backward.apply(t.neg.last().expect("seeded"));
                t.neg.push(next);
            }
        }
        t.lookup(j).expect("grown").clone()
    }
}

impl OrbitTables {
    fn lookup(&self, j: i64) -> Option<&IntVec3> {
        if j >= 0 {
            self.nonneg.get(j as usize)
        } else {
            self.neg.get((-j - 1) as usize)
        }
    }
}

static S_ORBIT: LazyLock<Orbit> =
    LazyLock::new(|| Orbit::new(IntMat3::s(), IntMat3::s_inv(), IntVec3::new(0, 1, 0)));

static S_STAR_ORBIT: LazyLock<Orbit> = LazyLock::new(|| {
    Orbit::new(
        IntMat3::s_star(),
        IntMat3::s_star_inv(),
        IntVec3::new(1, 0, 0),
    )
});

static VALIDATE: AtomicBool = AtomicBool::new(false);

/// Enables reconstruction checks inside [`coeffs_in_basis`].
pub fn set_validation(on: bool) {
    VALIDATE.store(on, Ordering::Relaxed);
}

/// `s_j = η(σʲ)`.
pub fn s_vec(j: i64) -> IntVec3 {
    S_ORBIT.get(j)
}

/// `s*_j = (S*)ʲ (1, 0, 0)`.
pub fn s_star_vec(j: i64) -> IntVec3 {
    S_STAR_ORBIT.get(j)
}

/// The basis `ℬ_j = (s_{j−1}, s_j, s_{j+1})` or its conjugate `ℬ*_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisTriple {
    pub j: i64,
    pub vectors: [IntVec3; 3],
}

impl BasisTriple {
    pub fn standard(j: i64) -> Self {
        BasisTriple {
            j,
            vectors: [s_vec(j - 1), s_vec(j), s_vec(j + 1)],
        }
    }

    pub fn conjugate(j: i64) -> Self {
        BasisTriple {
            j,
            vectors: [s_star_vec(j - 1), s_star_vec(j), s_star_vec(j + 1)],
        }
    }

    pub fn det(&self) -> BigInt {
        let [u, v, w] = &self.vectors;
        det3(u, v, w)
    }

    /// `a₁u + a₂v + a₃w`.
    pub fn combine(&self, a: &IntVec3) -> IntVec3 {
        let [u, v, w] = &self.vectors;
        let t = &u.scale(&a.0[0]) + &v.scale(&a.0[1]);
        &t + &w.scale(&a.0[2])
    }
}

/// `a₁s_{j−1} + a₂s_j + a₃s_{j+1}`.
pub fn combine(a: &IntVec3, j: i64) -> IntVec3 {
    BasisTriple::standard(j).combine(a)
}

/// Applies `Sᵏ` to `v` one factor at a time.
pub fn apply_s_power(v: &IntVec3, k: i64) -> IntVec3 {
    let m = if k >= 0 {
        IntMat3::s()
    } else {
        IntMat3::s_inv()
    };
    let mut out = v.clone();
    for _ in 0..k.unsigned_abs() {
        out = m.apply(&out);
    }
    out
}

/// Integer coordinates of `v` in `ℬ_j`, computed as `S^{−j} v`.
pub fn coeffs_in_basis(v: &IntVec3, j: i64) -> IntVec3 {
    let a = apply_s_power(v, -j);
    if VALIDATE.load(Ordering::Relaxed) {
        assert_eq!(
            &combine(&a, j),
            v,
            "coefficient reconstruction failed at j={j}"
        );
    }
    a
}
