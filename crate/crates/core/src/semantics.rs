//! Gradual semantics for weighted bipolar argumentation.
//!
//! Each model is a pair of a discrete per-argument update `f(w(i), attackers,
//! supporters)` and the derivative field of its continuous counterpart,
//! `ds_i/dt = f_i(s) - s_i`. The quadratic energy model is defined directly
//! by its differential equations; the other three are continuizations of
//! discrete schemes. All operations are pure functions of `(Bag, state)` and
//! safe to call concurrently.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bag::{ArgId, Bag};

/// Strength value per argument at one instant of model time.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    /// One strength in `[0,1]` per argument id.
    pub values: Vec<f64>,
    /// Model time `t >= 0`.
    pub time: f64,
}

impl StateVector {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        StateVector { values, time }
    }

    /// The initial state `s(0) = w`.
    pub fn initial(bag: &Bag) -> Self {
        StateVector::new(bag.weights(), 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Max-norm distance to another state of the same length.
    pub fn max_norm_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Failed lookup of a model name.
#[derive(Debug, Error)]
#[error("unknown model `{0}` (expected quad, euler, dfquad or sdfquad)")]
pub struct UnknownModel(pub String);

/// The built-in semantics models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Quadratic energy model: linear energy through the saturating impact
    /// function, attracted to the initial weight.
    QuadraticEnergy,
    /// Continuized Euler-based restricted semantics,
    /// `f = 1 - (1 - w^2) / (1 + w * exp(E))`.
    EulerBased,
    /// Continuized DF-QuAD: product-form geometric energy combined linearly
    /// (not continuously differentiable at zero energy).
    DfQuad,
    /// DF-QuAD over the squared geometric energy, which is continuously
    /// differentiable everywhere.
    SquaredDfQuad,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::QuadraticEnergy,
        Model::EulerBased,
        Model::DfQuad,
        Model::SquaredDfQuad,
    ];

    /// Short identifier used on the command line and in file headers.
    pub fn name(self) -> &'static str {
        match self {
            Model::QuadraticEnergy => "quad",
            Model::EulerBased => "euler",
            Model::DfQuad => "dfquad",
            Model::SquaredDfQuad => "sdfquad",
        }
    }

    /// Discrete update of a single argument given the current strengths.
    pub fn update_component(self, bag: &Bag, values: &[f64], j: ArgId) -> f64 {
        let w = bag.weight(j);
        match self {
            Model::QuadraticEnergy => {
                let e = energy_at(bag, values, j);
                w + (1.0 - w) * impact(e) - w * impact(-e)
            }
            Model::EulerBased => {
                let e = energy_at(bag, values, j);
                // w == 0 must short-circuit so 0 * inf cannot produce a NaN,
                // and zero energy yields exactly w (the algebraic value of
                // 1 - (1-w)(1+w)/(1+w), which plain evaluation misses by an
                // ulp; isolated arguments must sit exactly still).
                if w == 0.0 {
                    return 0.0;
                }
                if e == 0.0 {
                    return w;
                }
                // exp overflow saturates the update at its true limit 1
                let scaled = w * e.exp();
                if scaled.is_infinite() {
                    1.0
                } else {
                    1.0 - (1.0 - w * w) / (1.0 + scaled)
                }
            }
            Model::DfQuad => df_quad_combine(w, geometric_energy_at(bag, values, j)),
            Model::SquaredDfQuad => df_quad_combine(w, squared_geometric_energy_at(bag, values, j)),
        }
    }

    /// Derivative field of the continuous model: `update - s`, componentwise.
    pub fn derivative_component(self, bag: &Bag, values: &[f64], j: ArgId) -> f64 {
        self.update_component(bag, values, j) - values[j]
    }

    pub fn update_into(self, bag: &Bag, values: &[f64], out: &mut [f64]) {
        debug_assert_eq!(values.len(), bag.len());
        debug_assert_eq!(out.len(), bag.len());
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.update_component(bag, values, j);
        }
    }

    pub fn derivative_into(self, bag: &Bag, values: &[f64], out: &mut [f64]) {
        self.update_into(bag, values, out);
        for (o, v) in out.iter_mut().zip(values) {
            *o -= v;
        }
    }

    /// Discrete update applied to all arguments simultaneously.
    pub fn update(self, bag: &Bag, state: &StateVector) -> Vec<f64> {
        let mut out = vec![0.0; bag.len()];
        self.update_into(bag, &state.values, &mut out);
        out
    }

    /// Derivative of every argument at the given state.
    pub fn derivative(self, bag: &Bag, state: &StateVector) -> Vec<f64> {
        let mut out = vec![0.0; bag.len()];
        self.derivative_into(bag, &state.values, &mut out);
        out
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quad" => Ok(Model::QuadraticEnergy),
            "euler" => Ok(Model::EulerBased),
            "dfquad" => Ok(Model::DfQuad),
            "sdfquad" => Ok(Model::SquaredDfQuad),
            other => Err(UnknownModel(other.to_owned())),
        }
    }
}

/// Linear energy at `j`: supporter strengths minus attacker strengths.
/// Zero when `j` has no parents.
pub fn energy_at(bag: &Bag, values: &[f64], j: ArgId) -> f64 {
    let sup: f64 = bag.supporters(j).iter().map(|&i| values[i]).sum();
    let att: f64 = bag.attackers(j).iter().map(|&i| values[i]).sum();
    sup - att
}

/// Linear energy at `j` for a full state.
pub fn energy(bag: &Bag, state: &StateVector, j: ArgId) -> f64 {
    energy_at(bag, &state.values, j)
}

/// Impact of an energy value: `max(x,0)^2 / (1 + max(x,0)^2)`.
/// Zero for nonpositive input, strictly increasing after that, below 1.
pub fn impact(x: f64) -> f64 {
    let p = x.max(0.0);
    let p2 = p * p;
    p2 / (1.0 + p2)
}

/// Geometric energy at `j`: product of attacker complements minus product of
/// supporter complements, with empty products equal to 1. Always in `[-1,1]`
/// for states in `[0,1]`.
pub fn geometric_energy_at(bag: &Bag, values: &[f64], j: ArgId) -> f64 {
    let att: f64 = bag.attackers(j).iter().map(|&i| 1.0 - values[i]).product();
    let sup: f64 = bag.supporters(j).iter().map(|&i| 1.0 - values[i]).product();
    att - sup
}

/// Geometric energy at `j` for a full state.
pub fn geometric_energy(bag: &Bag, state: &StateVector, j: ArgId) -> f64 {
    geometric_energy_at(bag, &state.values, j)
}

/// Geometric energy over squared strengths, `prod(1 - s_i^2)` per side; the
/// smooth variant used by the squared DF-QuAD model.
pub fn squared_geometric_energy_at(bag: &Bag, values: &[f64], j: ArgId) -> f64 {
    let att: f64 = bag
        .attackers(j)
        .iter()
        .map(|&i| 1.0 - values[i] * values[i])
        .product();
    let sup: f64 = bag
        .supporters(j)
        .iter()
        .map(|&i| 1.0 - values[i] * values[i])
        .product();
    att - sup
}

/// Squared geometric energy at `j` for a full state.
pub fn squared_geometric_energy(bag: &Bag, state: &StateVector, j: ArgId) -> f64 {
    squared_geometric_energy_at(bag, &state.values, j)
}

/// DF-QuAD combination step: `w + w*min(e,0) + (1-w)*max(e,0)`.
fn df_quad_combine(w: f64, e: f64) -> f64 {
    w + w * e.min(0.0) + (1.0 - w) * e.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bag::{fixture, BagBuilder, Fixture};

    fn state(values: &[f64]) -> StateVector {
        StateVector::new(values.to_vec(), 0.0)
    }

    /// e-democracy graph with parent strengths pinned to their worked final
    /// values; only P2, A1, A2 have parents.
    fn edemocracy_finals() -> (crate::bag::Bag, StateVector) {
        let bag = fixture(Fixture::Edemocracy);
        // A1, A2 values are irrelevant for the energies below.
        let mut values = bag.weights();
        values[bag.id_of("P2").unwrap()] = 0.186;
        (bag, StateVector::new(values, 0.0))
    }

    #[test]
    fn energy_of_parentless_argument_is_zero() {
        let bag = fixture(Fixture::Edemocracy);
        let s = StateVector::initial(&bag);
        let p1 = bag.id_of("P1").unwrap();
        assert_eq!(energy(&bag, &s, p1), 0.0);
    }

    #[test]
    fn energy_worked_examples() {
        let (bag, s) = edemocracy_finals();
        let p2 = bag.id_of("P2").unwrap();
        let a2 = bag.id_of("A2").unwrap();
        let a1 = bag.id_of("A1").unwrap();
        // P2 is attacked by C2 (0.2), C3 (0.6) and C4 (0.5)
        assert!((energy(&bag, &s, p2) - (-1.3)).abs() < 1e-12);
        // A2 is supported by P3 (0.9) and attacked by C1 (0.2)
        assert!((energy(&bag, &s, a2) - 0.7).abs() < 1e-12);
        // A1 is supported by P1 (0.7) and P2 (0.186)
        assert!((energy(&bag, &s, a1) - 0.886).abs() < 1e-9);
    }

    #[test]
    fn impact_examples() {
        assert_eq!(impact(-5.0), 0.0);
        assert_eq!(impact(0.0), 0.0);
        assert!((impact(0.7) - 0.49 / 1.49).abs() < 1e-12);
        assert!((0.5 + 0.5 * impact(0.7) - 0.664).abs() < 5e-4);
        assert!((impact(1.3) - 1.69 / 2.69).abs() < 1e-12);
        assert!((0.5 - 0.5 * impact(1.3) - 0.186).abs() < 5e-4);
        assert_eq!(impact(1.0), 0.5);
    }

    #[test]
    fn impact_bounds_and_monotonicity() {
        let mut prev = 0.0;
        for i in 0..=400 {
            let x = -2.0 + i as f64 * 0.05;
            let h = impact(x);
            assert!((0.0..1.0).contains(&h));
            assert_eq!(h == 0.0, x <= 0.0);
            if x > 0.05 {
                assert!(h > prev, "impact must strictly increase at x={x}");
            }
            if x > 0.0 {
                prev = h;
            }
        }
    }

    #[test]
    fn quadratic_update_examples() {
        // no parents, w = 0.4 -> stays 0.4
        let mut b = BagBuilder::new();
        b.argument("a", 0.4).unwrap();
        let bag = b.build();
        assert_eq!(
            Model::QuadraticEnergy.update(&bag, &state(&[0.4])),
            vec![0.4]
        );

        // w = 0.5 with energy 0.886 -> about 0.719
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.5).unwrap();
        let p = b.argument("p", 0.886).unwrap();
        b.support(p, a).unwrap();
        let bag = b.build();
        let u = Model::QuadraticEnergy.update(&bag, &state(&[0.5, 0.886]));
        assert!((u[a] - 0.719).abs() < 1e-3);

        // w = 0.3, single attacker at 0.9 -> 0.3 - 0.3 * h(0.9)
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.3).unwrap();
        let x = b.argument("x", 0.9).unwrap();
        b.attack(x, a).unwrap();
        let bag = b.build();
        let u = Model::QuadraticEnergy.update(&bag, &state(&[0.3, 0.9]));
        let expected = 0.3 - 0.3 * (0.81 / 1.81);
        assert!((u[a] - expected).abs() < 1e-12);
        assert!((u[a] - 0.166).abs() < 1e-3);
    }

    #[test]
    fn quadratic_derivative_examples() {
        // at rest: s = w, no parents -> derivative 0
        let mut b = BagBuilder::new();
        b.argument("a", 0.7).unwrap();
        let bag = b.build();
        assert_eq!(
            Model::QuadraticEnergy.derivative(&bag, &state(&[0.7])),
            vec![0.0]
        );

        // w = 0.2, s = 0.2, attacker at strength 1 -> -0.2 * h(1) = -0.1
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.2).unwrap();
        let x = b.argument("x", 1.0).unwrap();
        b.attack(x, a).unwrap();
        let bag = b.build();
        let d = Model::QuadraticEnergy.derivative(&bag, &state(&[0.2, 1.0]));
        assert!((d[a] - (-0.1)).abs() < 1e-12);
    }

    #[test]
    fn stock_sell_initially_rises() {
        let bag = fixture(Fixture::Stock);
        let d = Model::QuadraticEnergy.derivative(&bag, &StateVector::initial(&bag));
        let sell = bag.id_of("Sell").unwrap();
        assert!(d[sell] > 0.0, "Sell must initially rise, got {}", d[sell]);
    }

    #[test]
    fn euler_based_update_examples() {
        // strength 0 and 1 arguments never move, whatever the parents do
        let mut b = BagBuilder::new();
        let zero = b.argument("zero", 0.0).unwrap();
        let one = b.argument("one", 1.0).unwrap();
        let sup = b.argument("sup", 0.9).unwrap();
        b.support(sup, zero).unwrap();
        b.attack(sup, one).unwrap();
        let bag = b.build();
        let u = Model::EulerBased.update(&bag, &state(&[0.0, 1.0, 0.9]));
        assert_eq!(u[zero], 0.0);
        assert_eq!(u[one], 1.0);

        // zero energy leaves the weight unchanged
        let mut b = BagBuilder::new();
        b.argument("a", 0.37).unwrap();
        let bag = b.build();
        let u = Model::EulerBased.update(&bag, &state(&[0.37]));
        assert!((u[0] - 0.37).abs() < 1e-12);

        // w = 0.5, E = 1 -> 1 - 0.75 / (1 + 0.5 e)
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.5).unwrap();
        let p = b.argument("p", 1.0).unwrap();
        b.support(p, a).unwrap();
        let bag = b.build();
        let u = Model::EulerBased.update(&bag, &state(&[0.5, 1.0]));
        let expected = 1.0 - 0.75 / (1.0 + 0.5 * std::f64::consts::E);
        assert!((u[a] - expected).abs() < 1e-12);
        assert!((u[a] - 0.6821).abs() < 1e-4);

        let d = Model::EulerBased.derivative(&bag, &state(&[0.5, 1.0]));
        assert!((d[a] - 0.1821).abs() < 1e-4);
    }

    #[test]
    fn euler_based_saturates_instead_of_overflowing() {
        // energy large enough to overflow exp; the update must hit 1 exactly
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.5).unwrap();
        let mut ids = Vec::new();
        for i in 0..800 {
            ids.push(b.argument(format!("s{i}"), 1.0).unwrap());
        }
        for id in ids {
            b.support(id, a).unwrap();
        }
        let bag = b.build();
        let values: Vec<f64> = bag.weights();
        let u = Model::EulerBased.update(&bag, &state(&values));
        assert_eq!(u[a], 1.0);
        assert!(u.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn geometric_energy_examples() {
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.8).unwrap();
        let x = b.argument("x", 0.3).unwrap();
        let y = b.argument("y", 0.2).unwrap();
        b.attack(x, a).unwrap();
        b.attack(y, a).unwrap();
        let bag = b.build();
        let s = state(&[0.8, 0.3, 0.2]);
        assert!((geometric_energy(&bag, &s, a) - (-0.44)).abs() < 1e-12);
        // no parents -> 1 - 1 = 0
        assert_eq!(geometric_energy(&bag, &s, x), 0.0);

        // one attacker at full strength saturates to -1
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.5).unwrap();
        let x = b.argument("x", 1.0).unwrap();
        b.attack(x, a).unwrap();
        let bag = b.build();
        assert_eq!(geometric_energy(&bag, &state(&[0.5, 1.0]), a), -1.0);
    }

    #[test]
    fn df_quad_update_examples() {
        // symmetric attacker and supporter cancel
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.4).unwrap();
        let x = b.argument("x", 0.5).unwrap();
        let y = b.argument("y", 0.5).unwrap();
        b.attack(x, a).unwrap();
        b.support(y, a).unwrap();
        let bag = b.build();
        let u = Model::DfQuad.update(&bag, &state(&[0.4, 0.5, 0.5]));
        assert_eq!(u[a], 0.4);

        // w = 0.8, attackers 0.3 and 0.2 -> 0.8 * (1 - 0.44) = 0.448
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.8).unwrap();
        let x = b.argument("x", 0.3).unwrap();
        let y = b.argument("y", 0.2).unwrap();
        b.attack(x, a).unwrap();
        b.attack(y, a).unwrap();
        let bag = b.build();
        let s = state(&[0.8, 0.3, 0.2]);
        let u = Model::DfQuad.update(&bag, &s);
        assert!((u[a] - 0.448).abs() < 1e-12);
        let d = Model::DfQuad.derivative(&bag, &s);
        assert!((d[a] - (-0.352)).abs() < 1e-12);

        // a supporter at full strength saturates to 1
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.6).unwrap();
        let p = b.argument("p", 1.0).unwrap();
        b.support(p, a).unwrap();
        let bag = b.build();
        let u = Model::DfQuad.update(&bag, &state(&[0.6, 1.0]));
        assert_eq!(u[a], 1.0);
    }

    #[test]
    fn squared_df_quad_examples() {
        // no parents -> weight
        let mut b = BagBuilder::new();
        b.argument("a", 0.4).unwrap();
        let bag = b.build();
        assert_eq!(Model::SquaredDfQuad.update(&bag, &state(&[0.4])), vec![0.4]);

        // w = 0.4, one attacker at 0.5 -> 0.4 - 0.4 * 0.25 = 0.3
        let mut b = BagBuilder::new();
        let a = b.argument("a", 0.4).unwrap();
        let x = b.argument("x", 0.5).unwrap();
        b.attack(x, a).unwrap();
        let bag = b.build();
        let u = Model::SquaredDfQuad.update(&bag, &state(&[0.4, 0.5]));
        assert!((u[a] - 0.3).abs() < 1e-12);

        // attacker at 1 behaves exactly as under plain geometric energy
        let s1 = state(&[0.4, 1.0]);
        assert_eq!(
            Model::SquaredDfQuad.update(&bag, &s1),
            Model::DfQuad.update(&bag, &s1)
        );
    }

    #[test]
    fn derivative_is_update_minus_state_for_all_models() {
        let bag = fixture(Fixture::Stock);
        let s = StateVector::new(vec![0.13, 0.97, 0.5, 0.02, 0.88, 0.61, 0.45], 0.0);
        for model in Model::ALL {
            let u = model.update(&bag, &s);
            let d = model.derivative(&bag, &s);
            for j in 0..bag.len() {
                assert!(
                    (d[j] - (u[j] - s.values[j])).abs() < 1e-15,
                    "{model}: component {j}"
                );
            }
        }
    }

    #[test]
    fn model_names_parse_and_display() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!("bogus".parse::<Model>().is_err());
    }
}
