use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;

use super::{EmbeddingTable, WalkConfig};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::rng;

const MIN_LR_FRACTION: f64 = 1e-4;
const MAX_LOGIT: f64 = 6.0;

#[inline]
fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-MAX_LOGIT, MAX_LOGIT);
    1.0 / (1.0 + (-x).exp())
}

/// Skip-gram with negative sampling over every `(center, context)` pair within
/// `window` positions. Negatives are drawn from the unigram distribution raised
/// to 0.75, and the learning rate decays linearly. Returns the input vectors.
///
/// Training is single-threaded and deterministic in `cfg.rng_seed`.
pub fn train_sgns(
    node_count: usize,
    corpus: &[Vec<NodeId>],
    cfg: &WalkConfig,
) -> Result<EmbeddingTable> {
    cfg.validate()?;
    let mut counts = vec![0u64; node_count];
    for walk in corpus {
        for &v in walk {
            if v >= node_count {
                return Err(Error::NodeOutOfRange {
                    node: v,
                    node_count,
                });
            }
            counts[v] += 1;
        }
    }
    if let Some(missing) = counts.iter().position(|&c| c == 0) {
        return Err(Error::NodeNotInCorpus(missing));
    }

    let dims = cfg.dims;
    let mut rng = rng::seeded(rng::derive(cfg.rng_seed, 0x5345_4e53));
    let bound = 0.5 / dims as f64;
    let mut input: Vec<f64> = (0..node_count * dims)
        .map(|_| rng.random_range(-bound..bound))
        .collect();
    let mut output = vec![0.0f64; node_count * dims];
    let noise = WeightedIndex::new(counts.iter().map(|&c| (c as f64).powf(0.75)))
        .map_err(|e| Error::InvalidArgument(format!("negative sampling table: {e}")))?;

    let positions: usize = corpus.iter().map(Vec::len).sum();
    let total_steps = (cfg.epochs * positions).max(1) as f64;
    let mut step = 0usize;
    let mut grad = vec![0.0f64; dims];

    for _ in 0..cfg.epochs {
        for walk in corpus {
            for (i, &center) in walk.iter().enumerate() {
                let lr = cfg.learning_rate * (1.0 - step as f64 / total_steps).max(MIN_LR_FRACTION);
                step += 1;
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window + 1).min(walk.len());
                for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let h = &input[center * dims..(center + 1) * dims];
                    let mut update = |target: NodeId, label: f64, grad: &mut [f64]| {
                        let out = &mut output[target * dims..(target + 1) * dims];
                        let dot: f64 = h.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
                        let g = (label - sigmoid(dot)) * lr;
                        for k in 0..dims {
                            grad[k] += g * out[k];
                            out[k] += g * h[k];
                        }
                    };
                    update(context, 1.0, &mut grad);
                    for _ in 0..cfg.negatives {
                        let neg = noise.sample(&mut rng);
                        if neg != context {
                            update(neg, 0.0, &mut grad);
                        }
                    }
                    for (x, g) in input[center * dims..(center + 1) * dims]
                        .iter_mut()
                        .zip(&grad)
                    {
                        *x += g;
                    }
                }
            }
        }
    }
    if input.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "training diverged at learning rate {}",
            cfg.learning_rate
        )));
    }
    Ok(EmbeddingTable::from_flat(dims, input))
}
