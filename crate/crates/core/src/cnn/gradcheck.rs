use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{loss_and_grad, CnnError, Gradients, Network, NetworkSpec, Tensor};

/// Central-difference step.
pub const GRADCHECK_EPS: f64 = 1e-5;
/// A check passes when the worst relative error is below this.
pub const GRADCHECK_TOLERANCE: f64 = 1e-4;
/// Floor on the relative-error denominator so that parameters whose true
/// gradient is ~0 are judged on absolute error.
const REL_FLOOR: f64 = 1e-6;
const BATCH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub seed: u64,
    pub parameters_checked: usize,
    pub max_relative_error: f64,
    /// `(tensor index, element index)` of the worst parameter.
    pub worst: (usize, usize),
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_relative_error < GRADCHECK_TOLERANCE
    }
}

/// Compares backpropagated gradients with central differences on a random
/// network and random batch derived from `seed`.
pub fn gradient_check(spec: &NetworkSpec, seed: u64) -> Result<GradCheckReport, CnnError> {
    gradient_check_with(spec, seed, |net, batch, labels| loss_and_grad(net, batch, labels).map(|r| r.1))
}

/// Like [`gradient_check`] but with a caller-supplied analytic gradient.
pub fn gradient_check_with<F>(spec: &NetworkSpec, seed: u64, analytic: F) -> Result<GradCheckReport, CnnError>
where
    F: Fn(&Network, &[Tensor], &[usize]) -> Result<Gradients, CnnError>,
{
    let mut network = Network::init(spec, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 1);
    // nonzero biases so the check also exercises the bias paths
    for (i, p) in network.parameters_mut().into_iter().enumerate() {
        if i % 2 == 1 {
            for b in p.iter_mut() {
                *b = rng.gen_range(-0.1..0.1);
            }
        }
    }
    let n_classes = network.n_classes();
    let shape = spec.input;
    let batch: Vec<Tensor> = (0..BATCH)
        .map(|_| {
            let data = (0..shape.len()).map(|_| rng.gen::<f64>()).collect();
            Tensor::new(vec![shape.channels, shape.height, shape.width], data)
        })
        .collect::<Result<_, _>>()?;
    let labels: Vec<usize> = (0..BATCH).map(|_| rng.gen_range(0..n_classes)).collect();

    let grads = analytic(&network, &batch, &labels)?;
    let mut worst = (0, 0);
    let mut max_err = 0.0_f64;
    let mut checked = 0;
    for t in 0..grads.tensors.len() {
        for e in 0..grads.tensors[t].len() {
            let original = network.parameters()[t][e];
            network.parameters_mut()[t][e] = original + GRADCHECK_EPS;
            let plus = loss_and_grad(&network, &batch, &labels)?.0;
            network.parameters_mut()[t][e] = original - GRADCHECK_EPS;
            let minus = loss_and_grad(&network, &batch, &labels)?.0;
            network.parameters_mut()[t][e] = original;

            let numeric = (plus - minus) / (2.0 * GRADCHECK_EPS);
            let a = grads.tensors[t][e];
            let err = (a - numeric).abs() / (a.abs() + numeric.abs()).max(REL_FLOOR);
            if err > max_err || !err.is_finite() {
                max_err = if err.is_finite() { err } else { f64::INFINITY };
                worst = (t, e);
            }
            checked += 1;
        }
    }
    Ok(GradCheckReport {
        seed,
        parameters_checked: checked,
        max_relative_error: max_err,
        worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnn::Shape;

    #[test]
    fn passes_on_default_spec() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 3);
        let report = gradient_check(&spec, 0).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.parameters_checked, Network::init(&spec, 0).unwrap().parameter_count());
    }

    #[test]
    fn corrupted_backward_fails() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 3);
        let report = gradient_check_with(&spec, 0, |net, b, l| {
            let (_, mut g) = loss_and_grad(net, b, l)?;
            g.tensors[0][0] += 0.05;
            Ok(g)
        })
        .unwrap();
        assert!(!report.passed());
        assert_eq!(report.worst, (0, 0));
    }

    #[test]
    fn same_seed_same_report() {
        let spec = NetworkSpec::desk_default(Shape::new(3, 8, 8), 2);
        assert_eq!(gradient_check(&spec, 5).unwrap(), gradient_check(&spec, 5).unwrap());
    }
}
