//! Elementary unitaries: color rotations, the three-port roundabout router,
//! controlled-phase / CNOT algebra, and the dual-rail single-qubit gadget.

use num_complex::Complex64;

use crate::error::{DomainError, Error, Result};

pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// Internal state of a walker: red routes left, blue routes right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn bit(self) -> u32 {
        match self {
            Color::Red => 0,
            Color::Blue => 1,
        }
    }

    pub fn from_bit(bit: u32) -> Self {
        if bit & 1 == 0 {
            Color::Red
        } else {
            Color::Blue
        }
    }
}

/// A 2x2 unitary acting on one walker's color register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorUnitary {
    m: [[Complex64; 2]; 2],
}

impl ColorUnitary {
    /// Wraps a matrix, rejecting anything not unitary within 1e-12.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = ColorUnitary { m };
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        ColorUnitary {
            m: [[one, zero], [zero, one]],
        }
    }

    pub fn pauli_x() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        ColorUnitary {
            m: [[zero, one], [one, zero]],
        }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        ColorUnitary {
            m: [[h, h], [h, -h]],
        }
    }

    /// Rotation about the y axis: exp(-i theta Y / 2).
    pub fn rotation_y(theta: f64) -> Self {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new((theta / 2.0).sin(), 0.0);
        ColorUnitary {
            m: [[c, -s], [s, c]],
        }
    }

    /// Rotation about the z axis: exp(-i theta Z / 2).
    pub fn rotation_z(theta: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        ColorUnitary {
            m: [
                [Complex64::from_polar(1.0, -theta / 2.0), zero],
                [zero, Complex64::from_polar(1.0, theta / 2.0)],
            ],
        }
    }

    /// The universal single-qubit form e^{i t0} Rz(t1) Ry(t2) Rz(t3).
    pub fn from_angles(t0: f64, t1: f64, t2: f64, t3: f64) -> Self {
        let phase = Complex64::from_polar(1.0, t0);
        Self::rotation_z(t1)
            .mul(&Self::rotation_y(t2))
            .mul(&Self::rotation_z(t3))
            .scale(phase)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        ColorUnitary { m: out }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.m;
        for row in &mut out {
            for entry in row {
                *entry *= factor;
            }
        }
        ColorUnitary { m: out }
    }

    pub fn adjoint(&self) -> Self {
        ColorUnitary {
            m: [
                [self.m[0][0].conj(), self.m[1][0].conj()],
                [self.m[0][1].conj(), self.m[1][1].conj()],
            ],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// Image of the basis state |bit>: the two (output bit, amplitude) pairs.
    pub fn column(&self, bit: u32) -> [(u32, Complex64); 2] {
        let col = (bit & 1) as usize;
        [(0, self.m[0][col]), (1, self.m[1][col])]
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let ad = self.adjoint();
        let prod = ad.mul(self);
        let id = Self::identity();
        let mut dev: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                dev = dev.max((prod.m[i][j] - id.m[i][j]).norm());
            }
        }
        dev
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (self.m[i][j] - other.m[i][j]).norm() <= tol))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Self::identity(), tol)
    }
}

/// Which way the router sends a red walker: Left advances it one slot
/// clockwise, Right is the exact inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Left,
    Right,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
        }
    }
}

/// A three-port roundabout router and the paths wired to its slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundaboutSpec {
    pub orientation: Orientation,
    pub slots: [u32; 3],
}

impl RoundaboutSpec {
    pub fn new(orientation: Orientation, slots: [u32; 3]) -> Result<Self> {
        if slots[0] == slots[1] || slots[0] == slots[2] || slots[1] == slots[2] {
            return Err(Error::DuplicateSlots);
        }
        Ok(RoundaboutSpec { orientation, slots })
    }

    pub fn path(&self, slot: usize) -> u32 {
        self.slots[slot]
    }
}

/// Exit slot for a walker of the given color entering at slot `entry`.
/// Left orientation moves red to entry+1 (mod 3) and blue to entry-1;
/// right orientation is the inverse.
pub fn roundabout_step(spec: &RoundaboutSpec, color: Color, entry: usize) -> usize {
    assert!(entry < 3, "roundabout has three slots");
    let forward = match (spec.orientation, color) {
        (Orientation::Left, Color::Red) | (Orientation::Right, Color::Blue) => true,
        (Orientation::Left, Color::Blue) | (Orientation::Right, Color::Red) => false,
    };
    if forward {
        (entry + 1) % 3
    } else {
        (entry + 2) % 3
    }
}

pub type Mat4 = [[Complex64; 4]; 4];

fn mat4_zero() -> Mat4 {
    [[Complex64::new(0.0, 0.0); 4]; 4]
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = mat4_zero();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            for (k, b_row) in b.iter().enumerate() {
                *entry += a[i][k] * b_row[j];
            }
        }
    }
    out
}

/// The controlled-phase gate diag(1, 1, 1, -1) on basis |q_ctl q_tgt>.
pub fn cp_matrix() -> Mat4 {
    let mut m = mat4_zero();
    let one = Complex64::new(1.0, 0.0);
    m[0][0] = one;
    m[1][1] = one;
    m[2][2] = one;
    m[3][3] = -one;
    m
}

/// CNOT assembled as H_target CP H_target; equals the standard CNOT matrix.
pub fn cnot_from_cp() -> Mat4 {
    let h = ColorUnitary::hadamard();
    // H on the target (low) qubit of |q_ctl q_tgt>: I (x) H.
    let mut h_t = mat4_zero();
    for block in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                h_t[2 * block + i][2 * block + j] = h.entry(i, j);
            }
        }
    }
    mat4_mul(&mat4_mul(&h_t, &cp_matrix()), &h_t)
}

/// CX from an address qubit onto the same walker's color: flips the color
/// iff the address bit is 1. Pure basis map on (address bit, color bit).
pub fn cx_address_color(address_bit: u32, color_bit: u32) -> (u32, u32) {
    (address_bit & 1, (color_bit ^ address_bit) & 1)
}

/// CX between two walkers' colors: flips the target iff the control is 1.
pub fn cx_color_color(control: u32, target: u32) -> (u32, u32) {
    (control & 1, (target ^ control) & 1)
}

/// The dual-rail single-qubit gadget: a red walker on rail `value` leaves
/// with its position register transformed by `u` and its color restored to
/// red. Undefined for blue input.
pub fn dual_rail_single_qubit(
    u: &ColorUnitary,
    color: Color,
    value: u32,
) -> Result<[(u32, Complex64); 2]> {
    if color != Color::Red {
        return Err(Error::Domain(DomainError {
            operator: "dual_rail_single_qubit".into(),
            term: format!("color={color:?} value={value}"),
            reason: "gadget requires a red walker".into(),
        }));
    }
    Ok(u.column(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);
    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} != {b}");
    }

    #[test]
    fn rotation_y_pi_acts_like_x_on_basis_zero() {
        let ry = ColorUnitary::rotation_y(std::f64::consts::PI);
        // |0> -> |1>, |1> -> -|0> (the sign is part of the rotation).
        assert_close(ry.entry(1, 0), ONE, 1e-15);
        assert_close(ry.entry(0, 0), ZERO, 1e-15);
        assert_close(ry.entry(0, 1), -ONE, 1e-15);
    }

    #[test]
    fn rotation_z_zero_is_identity() {
        assert!(ColorUnitary::rotation_z(0.0).is_identity(1e-15));
    }

    #[test]
    fn hadamard_from_rotations() {
        // i Ry(pi/2) Rz(pi) is the Hadamard matrix.
        let built = ColorUnitary::rotation_y(std::f64::consts::FRAC_PI_2)
            .mul(&ColorUnitary::rotation_z(std::f64::consts::PI))
            .scale(Complex64::new(0.0, 1.0));
        assert!(built.approx_eq(&ColorUnitary::hadamard(), 1e-12));
    }

    #[test]
    fn from_angles_global_phase() {
        // Only t0 = pi set: e^{i pi} I negates every amplitude.
        let u = ColorUnitary::from_angles(std::f64::consts::PI, 0.0, 0.0, 0.0);
        assert!(u.approx_eq(&ColorUnitary::identity().scale(-ONE), 1e-12));
    }

    #[test]
    fn random_angle_draws_are_unitary() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let t: [f64; 4] = std::array::from_fn(|_| rng.random_range(-10.0..10.0));
            let u = ColorUnitary::from_angles(t[0], t[1], t[2], t[3]);
            assert!(u.unitarity_deviation() <= 1e-12);
        }
    }

    #[test]
    fn roundabout_examples() {
        let left = RoundaboutSpec::new(Orientation::Left, [10, 11, 12]).unwrap();
        let right = RoundaboutSpec::new(Orientation::Right, [10, 11, 12]).unwrap();
        assert_eq!(roundabout_step(&left, Color::Red, 0), 1);
        assert_eq!(roundabout_step(&left, Color::Blue, 0), 2);
        assert_eq!(roundabout_step(&right, Color::Red, 1), 0);
    }

    #[test]
    fn roundabout_left_right_are_mutually_inverse() {
        let left = RoundaboutSpec::new(Orientation::Left, [0, 1, 2]).unwrap();
        let right = RoundaboutSpec::new(Orientation::Right, [0, 1, 2]).unwrap();
        for color in [Color::Red, Color::Blue] {
            for entry in 0..3 {
                let there = roundabout_step(&left, color, entry);
                assert_eq!(roundabout_step(&right, color, there), entry);
                let back = roundabout_step(&right, color, entry);
                assert_eq!(roundabout_step(&left, color, back), entry);
                // 18 cases total: 3 slots x 2 colors x both compositions.
            }
        }
    }

    #[test]
    fn roundabout_rejects_duplicate_slots() {
        assert!(RoundaboutSpec::new(Orientation::Left, [4, 4, 5]).is_err());
    }

    #[test]
    fn cp_examples() {
        let cp = cp_matrix();
        assert_close(cp[3][3], -ONE, 0.0);
        assert_close(cp[0][0], ONE, 0.0);
        assert_close(cp[2][2], ONE, 0.0);
        assert_close(cp[2][3], ZERO, 0.0);
    }

    #[test]
    fn cnot_from_cp_matches_truth_table() {
        // Oracle: the canonical CNOT matrix written out entry by entry.
        let mut expected = mat4_zero();
        expected[0][0] = ONE; // |00> -> |00>
        expected[1][1] = ONE; // |01> -> |01>
        expected[3][2] = ONE; // |10> -> |11>
        expected[2][3] = ONE; // |11> -> |10>
        let got = cnot_from_cp();
        for i in 0..4 {
            for j in 0..4 {
                assert_close(got[i][j], expected[i][j], 1e-12);
            }
        }
    }

    #[test]
    fn cx_basis_maps() {
        assert_eq!(cx_address_color(1, 0), (1, 1));
        assert_eq!(cx_address_color(0, 1), (0, 1));
        assert_eq!(cx_address_color(1, 1), (1, 0));
        assert_eq!(cx_color_color(1, 0), (1, 1));
        assert_eq!(cx_color_color(0, 1), (0, 1));
        // Involution over all four inputs.
        for c in 0..2 {
            for t in 0..2 {
                let (c1, t1) = cx_color_color(c, t);
                assert_eq!(cx_color_color(c1, t1), (c, t));
            }
        }
    }

    /// Oracle for the gadget: embed it as swap . (U (x) I) . swap on the
    /// (color, position) pair and read off the color-0 block.
    fn gadget_oracle(u: &ColorUnitary, value: u32) -> [Complex64; 2] {
        // Basis |color, position>: index 2*color + position.
        let mut swap = mat4_zero();
        swap[0][0] = ONE;
        swap[2][1] = ONE;
        swap[1][2] = ONE;
        swap[3][3] = ONE;
        let mut u_color = mat4_zero();
        for i in 0..2 {
            for j in 0..2 {
                for pos in 0..2 {
                    u_color[2 * i + pos][2 * j + pos] = u.entry(i, j);
                }
            }
        }
        let total = mat4_mul(&swap, &mat4_mul(&u_color, &swap));
        let col = value as usize; // input |0, value>
        [total[0][col], total[1][col]]
    }

    #[test]
    fn dual_rail_gadget_examples() {
        let x = ColorUnitary::pauli_x();
        let out = dual_rail_single_qubit(&x, Color::Red, 0).unwrap();
        assert_close(out[0].1, ZERO, 1e-15);
        assert_close(out[1].1, ONE, 1e-15);

        let id = ColorUnitary::identity();
        let out = dual_rail_single_qubit(&id, Color::Red, 1).unwrap();
        assert_close(out[0].1, ZERO, 1e-15);
        assert_close(out[1].1, ONE, 1e-15);

        let h = ColorUnitary::hadamard();
        let out = dual_rail_single_qubit(&h, Color::Red, 0).unwrap();
        let expected = gadget_oracle(&h, 0);
        assert_close(out[0].1, expected[0], 1e-12);
        assert_close(out[1].1, expected[1], 1e-12);

        assert!(dual_rail_single_qubit(&h, Color::Blue, 0).is_err());
    }

    #[test]
    fn dual_rail_gadget_matches_oracle_for_rotations() {
        for k in 0..8 {
            let u = ColorUnitary::rotation_y(0.37 * k as f64);
            for value in 0..2u32 {
                let got = dual_rail_single_qubit(&u, Color::Red, value).unwrap();
                let expected = gadget_oracle(&u, value);
                assert_close(got[0].1, expected[0], 1e-12);
                assert_close(got[1].1, expected[1], 1e-12);
            }
        }
    }

    #[test]
    fn gadget_then_adjoint_is_identity() {
        let u = ColorUnitary::from_angles(0.3, 1.1, -0.7, 2.2);
        for value in 0..2u32 {
            let first = dual_rail_single_qubit(&u, Color::Red, value).unwrap();
            let mut total = [ZERO; 2];
            for (mid, amp) in first {
                let second = dual_rail_single_qubit(&u.adjoint(), Color::Red, mid).unwrap();
                for (out, amp2) in second {
                    total[out as usize] += amp * amp2;
                }
            }
            assert_close(total[value as usize], ONE, 1e-12);
            assert_close(total[1 - value as usize], ZERO, 1e-12);
        }
    }
}
