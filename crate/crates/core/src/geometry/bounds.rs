use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named closed-form value together with the inputs it was evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: Vec<(String, f64)>,
    pub value: f64,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, inputs: Vec<(&str, f64)>, value: f64) -> Self {
        BoundReport {
            name: name.into(),
            inputs: inputs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            value,
        }
    }
}

/// Upper bound d ln d + d ln ln d + 5d on the translative covering density
/// of any convex body in dimension d.
pub fn rogers_bound(d: u32) -> Result<BoundReport> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "covering density bound needs d >= 2, got {d}"
        )));
    }
    let df = d as f64;
    let value = df * df.ln() + df * df.ln().ln() + 5.0 * df;
    Ok(BoundReport::new("covering_density", vec![("d", df)], value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_density_bound_values() {
        let r2 = rogers_bound(2).unwrap();
        assert!((r2.value - 10.653_268_5).abs() < 1e-6);
        let r3 = rogers_bound(3).unwrap();
        assert!((r3.value - 18.577_980_3).abs() < 1e-6);
        assert!(matches!(rogers_bound(1), Err(Error::InvalidDimension(_))));
    }
}
