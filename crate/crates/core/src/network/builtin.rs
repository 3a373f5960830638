//! Built-in model library.

use super::{network_from_dsl, RateAssignment, ReactionNetwork};
use crate::error::{Error, Result};

/// A named model with default rate coefficients and initial concentrations.
#[derive(Clone, Debug)]
pub struct Builtin {
    pub name: String,
    pub network: ReactionNetwork,
    pub rates: RateAssignment,
    pub initial: Vec<f64>,
    /// `false` when the defaults are placeholders (all ones) rather than
    /// published values.
    pub published_rates: bool,
}

const MODELS: &[&str] = &[
    "wegscheider",
    "wegscheider-irrev",
    "envz-ompr",
    "ross-chain",
    "lotka-volterra",
    "consecutive",
    "chain(n)",
];

/// Rate coefficients of the eight-species Ross chain in step order
/// `k0, k1, k-1, ..., k7, k-7, k8`.
pub const ROSS_RATES: [f64; 16] =
    [0.1, 2.0, 0.1, 8.0, 5.0, 3.0, 0.4, 1.0, 1.0, 6.0, 0.5, 4.0, 2.0, 10.0, 1.0, 1.0];

pub fn available_models() -> &'static [&'static str] {
    MODELS
}

fn model(name: &str, dsl: &str, rates: Option<Vec<f64>>, initial: Vec<f64>) -> Result<Builtin> {
    let network = network_from_dsl(dsl)?;
    let published_rates = rates.is_some();
    let rates = match rates {
        Some(v) => RateAssignment::for_network(&network, v)?,
        None => RateAssignment::ones(network.num_steps()),
    };
    Ok(Builtin { name: name.to_string(), network, rates, initial, published_rates })
}

fn chain_dsl(n: usize) -> String {
    (1..n).map(|i| format!("X{i} <-> X{}", i + 1)).collect::<Vec<_>>().join(", ")
}

/// Loads a model by name. `chain(n)` builds `X1 <-> X2 <-> ... <-> Xn`.
pub fn load_builtin(name: &str) -> Result<Builtin> {
    let unknown = || Error::UnknownModel { name: name.to_string(), available: MODELS.join(", ") };
    match name {
        "wegscheider" => model(name, "A <-> B, 2 A <-> A + B", None, vec![1.0, 1.0]),
        "wegscheider-irrev" => model(name, "A + B -> 2 B, B -> A", None, vec![1.0, 1.0]),
        "envz-ompr" => model(
            name,
            "X <-> XT, XT -> Xp, Xp + Y <-> XpY, XpY -> X + Yp, XT + Yp <-> XTYp, XTYp -> XT + Y",
            None,
            vec![1.0; 7],
        ),
        "ross-chain" => {
            let mut dsl = String::from("0 -> X1, ");
            dsl.push_str(&chain_dsl(8));
            dsl.push_str(", X8 -> 0");
            model(name, &dsl, Some(ROSS_RATES.to_vec()), vec![0.0; 8])
        }
        "lotka-volterra" => model(
            name,
            "X -> 2 X, X + Y -> 2 Y, Y -> 0",
            Some(vec![1.0, 1.0 / 1000.0, 1.0]),
            vec![600.0, 400.0],
        ),
        "consecutive" => model(name, "A -> B, B -> C", None, vec![1.0, 0.0, 0.0]),
        _ => {
            let n: usize = name
                .strip_prefix("chain(")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(unknown)?;
            if n < 2 {
                return Err(Error::InvalidArgument("chain(n) needs n >= 2".into()));
            }
            let rates = (1..=2 * (n - 1)).map(|k| k as f64).collect();
            let initial = (1..=n).map(|i| 0.1 * i as f64).collect();
            model(name, &chain_dsl(n), Some(rates), initial)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::reversible_pairs;

    #[test]
    fn every_listed_model_loads() {
        for name in MODELS {
            let name = name.replace("(n)", "(4)");
            let b = load_builtin(&name).unwrap();
            assert_eq!(b.rates.len(), b.network.num_steps());
            assert_eq!(b.initial.len(), b.network.num_species());
        }
    }

    #[test]
    fn ross_chain_shape() {
        let b = load_builtin("ross-chain").unwrap();
        assert_eq!(b.network.num_steps(), 16);
        assert_eq!(b.network.num_species(), 8);
        assert!(b.network.steps()[0].reactant.is_zero());
        assert!(b.network.steps()[15].product.is_zero());
        assert_eq!(b.rates.values(), &ROSS_RATES);
    }

    #[test]
    fn chain_1000() {
        let b = load_builtin("chain(1000)").unwrap();
        assert_eq!(b.network.num_steps(), 1998);
        assert_eq!(reversible_pairs(&b.network).pairs.len(), 999);
        assert_eq!(b.rates[1997], 1998.0);
        assert!((b.initial[999] - 100.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_model_lists_names() {
        match load_builtin("brusselator") {
            Err(Error::UnknownModel { available, .. }) => assert!(available.contains("ross-chain")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
