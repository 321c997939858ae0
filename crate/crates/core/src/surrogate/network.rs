//! Graph-encoded neural surrogate for the design-fidelity map.
//!
//! The chip is treated as a graph of 14 nodes (nine transmons, four coupling
//! resonators, one readout resonator) joined by the 16 physical couplings.
//! Each node carries four features filled from the normalized 34-dimensional
//! design vector; one mean-aggregation message-passing round concatenates a
//! node's own features with the mean of its neighbors', and a shared linear
//! layer with tanh produces an 8-dimensional embedding per node. The
//! flattened embeddings feed a fully connected head (default 64 -> 64 -> 1)
//! with a sigmoid output, so predictions always land in (0, 1).
//!
//! A pure-MLP ablation (the head alone, reading the raw design vector) is
//! available for comparison. All gradients — with respect to weights for
//! training and with respect to the input for design optimization — come from
//! reverse-mode differentiation implemented here.

use std::path::Path;

use crate::error::{Error, Result};
use crate::surrogate::theta::THETA_DIM;
use crate::util::{fnv1a64, rng_for};
use rand::Rng;

/// Nodes of the chip graph, in canonical mode order.
pub const NODE_COUNT: usize = 14;

/// Features per node.
pub const NODE_FEATURES: usize = 4;

/// Per-node embedding width after the message-passing round.
pub const EMBED_DIM: usize = 8;

/// Default hidden widths of the fully connected head.
pub const DEFAULT_HIDDEN: [usize; 2] = [64, 64];

/// Magic line opening every serialized weights artifact.
pub const WEIGHTS_MAGIC: &str = "qchip-surrogate v1";

/// Largest sigmoid output representable strictly below one.
const SIGMOID_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

/// Neighbor lists of the chip graph: four interior transmons (0-3), four
/// exterior transmons (4-7), the tunable transmon (8), four coupling
/// resonators (9-12), the readout resonator (13). Edges: interior-coupler,
/// interior-tunable, interior-exterior, exterior-readout.
fn neighbors(node: usize) -> &'static [usize] {
    const TABLE: [&[usize]; NODE_COUNT] = [
        &[9, 8, 4],
        &[10, 8, 5],
        &[11, 8, 6],
        &[12, 8, 7],
        &[13, 0],
        &[13, 1],
        &[13, 2],
        &[13, 3],
        &[0, 1, 2, 3],
        &[0],
        &[1],
        &[2],
        &[3],
        &[4, 5, 6, 7],
    ];
    TABLE[node]
}

/// Which design-vector dimension fills a given node feature slot; `None`
/// slots stay zero. Every dimension appears exactly once.
fn feature_source(node: usize, feature: usize) -> Option<usize> {
    match node {
        0..=3 => match feature {
            0 => Some(node),          // interior frequency
            1 => Some(16 + node),     // dispersive strength to the tunable
            2 => Some(28 + node),     // bare coupling
            _ => None,
        },
        4..=7 => {
            let k = node - 4;
            match feature {
                0 => Some(4 + k),     // exterior frequency
                1 => Some(12 + k),    // dispersive strength to the interior
                2 => Some(20 + k),    // ring dispersive strength
                3 => Some(24 + k),    // bare coupling
                _ => None,
            }
        }
        8 => match feature {
            0 => Some(33),            // flux bias
            1 => Some(32),            // bare coupling of the tunable
            _ => None,
        },
        9..=12 => match feature {
            0 => Some(8 + (node - 9)), // coupling-resonator frequency
            _ => None,
        },
        _ => None, // readout resonator: no optimized dimensions
    }
}

/// Network variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    /// Graph encoder feeding the fully connected head.
    Graph,
    /// Ablation: the head alone on the raw design vector.
    Mlp,
}

impl Architecture {
    pub fn name(&self) -> &'static str {
        match self {
            Architecture::Graph => "graph",
            Architecture::Mlp => "mlp",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "graph" => Ok(Architecture::Graph),
            "mlp" => Ok(Architecture::Mlp),
            other => Err(Error::CorruptArtifact(format!("unknown architecture '{other}'"))),
        }
    }
}

/// One dense layer's shape and offsets into the flat weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LayerSpec {
    rows: usize,
    cols: usize,
    w_off: usize,
    b_off: usize,
}

impl LayerSpec {
    fn len(&self) -> usize {
        self.rows * self.cols + self.rows
    }
}

/// Anything that maps a normalized design vector to a scalar in [0, 1].
pub trait Predictor: Sync {
    fn predict(&self, theta: &[f64]) -> Result<f64>;
}

/// A predictor that also exposes the gradient of its output with respect to
/// the input, as required by gradient-based design optimization.
pub trait DifferentiablePredictor: Predictor {
    fn value_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// Prediction together with both gradient families.
#[derive(Debug, Clone)]
pub struct PredictionGradients {
    pub value: f64,
    /// Gradient with respect to every weight, flat layout.
    pub weights: Vec<f64>,
    /// Gradient with respect to the input design vector.
    pub input: Vec<f64>,
}

/// The surrogate network.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel {
    arch: Architecture,
    hidden: Vec<usize>,
    embed: Option<LayerSpec>,
    head: Vec<LayerSpec>,
    weights: Vec<f64>,
}

/// Intermediate activations kept for the backward pass.
struct Cache {
    theta: Vec<f64>,
    /// Concatenated `[own; neighbor-mean]` feature blocks (graph only).
    node_u: Vec<f64>,
    /// `head_acts[0]` is the head input; each following entry is one layer's
    /// activation output, ending with the scalar prediction.
    head_acts: Vec<Vec<f64>>,
}

impl SurrogateModel {
    /// Fresh model with the default head widths and seeded initialization.
    pub fn new(arch: Architecture, seed: u64) -> Self {
        SurrogateModel::with_hidden(arch, &DEFAULT_HIDDEN, seed)
            .expect("default hidden widths are valid")
    }

    /// Fresh model with custom hidden widths (for small gradient-check nets).
    pub fn with_hidden(arch: Architecture, hidden: &[usize], seed: u64) -> Result<Self> {
        if hidden.is_empty() || hidden.contains(&0) {
            return Err(Error::InvalidArgument(
                "head needs at least one hidden layer of nonzero width".into(),
            ));
        }
        let mut offset = 0;
        let mut alloc = |rows: usize, cols: usize| {
            let spec = LayerSpec { rows, cols, w_off: offset, b_off: offset + rows * cols };
            offset += spec.len();
            spec
        };
        let embed = match arch {
            Architecture::Graph => Some(alloc(EMBED_DIM, 2 * NODE_FEATURES)),
            Architecture::Mlp => None,
        };
        let head_input = match arch {
            Architecture::Graph => NODE_COUNT * EMBED_DIM,
            Architecture::Mlp => THETA_DIM,
        };
        let mut head = Vec::with_capacity(hidden.len() + 1);
        let mut prev = head_input;
        for &width in hidden {
            head.push(alloc(width, prev));
            prev = width;
        }
        head.push(alloc(1, prev));

        let mut weights = vec![0.0; offset];
        for (l, spec) in embed.iter().chain(head.iter()).enumerate() {
            let mut rng = rng_for(seed, l as u64);
            let limit = (6.0 / (spec.rows + spec.cols) as f64).sqrt();
            for w in &mut weights[spec.w_off..spec.w_off + spec.rows * spec.cols] {
                *w = rng.gen_range(-limit..limit);
            }
            // Biases start at zero.
        }
        Ok(SurrogateModel { arch, hidden: hidden.to_vec(), embed, head, weights })
    }

    pub fn arch(&self) -> Architecture {
        self.arch
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn n_weights(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mutable weight access for optimizers and finite-difference checks.
    /// Callers must keep every entry finite.
    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    /// All weights finite?
    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::UnphysicalParameters("model holds non-finite weights".into()));
        }
        Ok(())
    }

    /// Human-readable architecture line; its FNV-1a hash is stored with the
    /// weights so a mismatched file is rejected on load.
    pub fn architecture_descriptor(&self) -> String {
        let widths: Vec<String> = self.hidden.iter().map(|w| w.to_string()).collect();
        let head_input = match self.arch {
            Architecture::Graph => NODE_COUNT * EMBED_DIM,
            Architecture::Mlp => THETA_DIM,
        };
        format!(
            "{} in={} embed={} head={}->{}->1",
            self.arch.name(),
            THETA_DIM,
            match self.arch {
                Architecture::Graph => format!("{EMBED_DIM}x{}", 2 * NODE_FEATURES),
                Architecture::Mlp => "none".to_string(),
            },
            head_input,
            widths.join("->"),
        )
    }

    pub fn architecture_hash(&self) -> u64 {
        fnv1a64(self.architecture_descriptor().as_bytes())
    }

    /// Forward pass caching every activation.
    fn forward_cache(&self, theta: &[f64]) -> Result<Cache> {
        if theta.len() != THETA_DIM {
            return Err(Error::DimensionMismatch(format!(
                "expected {THETA_DIM} input coordinates, got {}",
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("input vector has non-finite entries".into()));
        }

        let mut node_u = Vec::new();
        let head_input = match self.arch {
            Architecture::Mlp => theta.to_vec(),
            Architecture::Graph => {
                let spec = self.embed.expect("graph models carry an embed layer");
                // Node features, then own/neighbor-mean concatenation.
                let mut x = vec![0.0; NODE_COUNT * NODE_FEATURES];
                for v in 0..NODE_COUNT {
                    for f in 0..NODE_FEATURES {
                        if let Some(d) = feature_source(v, f) {
                            x[v * NODE_FEATURES + f] = theta[d];
                        }
                    }
                }
                let mut u = vec![0.0; NODE_COUNT * 2 * NODE_FEATURES];
                for v in 0..NODE_COUNT {
                    let nbs = neighbors(v);
                    let inv = 1.0 / nbs.len() as f64;
                    for f in 0..NODE_FEATURES {
                        u[v * 2 * NODE_FEATURES + f] = x[v * NODE_FEATURES + f];
                        let mean: f64 =
                            nbs.iter().map(|&nb| x[nb * NODE_FEATURES + f]).sum::<f64>() * inv;
                        u[v * 2 * NODE_FEATURES + NODE_FEATURES + f] = mean;
                    }
                }
                // Shared embedding layer applied per node.
                let mut z = vec![0.0; NODE_COUNT * EMBED_DIM];
                for v in 0..NODE_COUNT {
                    let uv = &u[v * 2 * NODE_FEATURES..(v + 1) * 2 * NODE_FEATURES];
                    for r in 0..EMBED_DIM {
                        let mut s = self.weights[spec.b_off + r];
                        let row = &self.weights
                            [spec.w_off + r * spec.cols..spec.w_off + (r + 1) * spec.cols];
                        for (w, uc) in row.iter().zip(uv) {
                            s += w * uc;
                        }
                        z[v * EMBED_DIM + r] = s.tanh();
                    }
                }
                node_u = u;
                z
            }
        };

        let mut head_acts = Vec::with_capacity(self.head.len() + 1);
        head_acts.push(head_input);
        for (l, spec) in self.head.iter().enumerate() {
            let last = l + 1 == self.head.len();
            let prev = &head_acts[l];
            let mut out = vec![0.0; spec.rows];
            for (r, o) in out.iter_mut().enumerate() {
                let mut s = self.weights[spec.b_off + r];
                let row =
                    &self.weights[spec.w_off + r * spec.cols..spec.w_off + (r + 1) * spec.cols];
                for (w, a) in row.iter().zip(prev) {
                    s += w * a;
                }
                *o = if last {
                    (1.0 / (1.0 + (-s).exp())).clamp(f64::MIN_POSITIVE, SIGMOID_CEIL)
                } else {
                    s.tanh()
                };
            }
            head_acts.push(out);
        }
        Ok(Cache { theta: theta.to_vec(), node_u, head_acts })
    }

    /// Reverse-mode pass. `upstream` is dL/d(output); weight gradients are
    /// accumulated into `grad_w` and, when requested, input gradients into
    /// `grad_in`.
    fn backward_into(
        &self,
        cache: &Cache,
        upstream: f64,
        grad_w: &mut [f64],
        grad_in: Option<&mut [f64]>,
    ) {
        debug_assert_eq!(grad_w.len(), self.weights.len());
        let out = cache.head_acts.last().expect("cache holds the output")[0];
        // Pre-activation gradient of the sigmoid output layer.
        let mut delta = vec![upstream * out * (1.0 - out)];

        let mut head_input_grad = Vec::new();
        for l in (0..self.head.len()).rev() {
            let spec = self.head[l];
            let a_prev = &cache.head_acts[l];
            for (r, &dr) in delta.iter().enumerate() {
                grad_w[spec.b_off + r] += dr;
                let row = &mut grad_w[spec.w_off + r * spec.cols..spec.w_off + (r + 1) * spec.cols];
                for (g, a) in row.iter_mut().zip(a_prev) {
                    *g += dr * a;
                }
            }
            let mut da = vec![0.0; spec.cols];
            for (r, &dr) in delta.iter().enumerate() {
                let row =
                    &self.weights[spec.w_off + r * spec.cols..spec.w_off + (r + 1) * spec.cols];
                for (d, w) in da.iter_mut().zip(row) {
                    *d += w * dr;
                }
            }
            if l > 0 {
                delta = da.iter().zip(a_prev).map(|(d, a)| d * (1.0 - a * a)).collect();
            } else {
                head_input_grad = da;
            }
        }

        match self.arch {
            Architecture::Mlp => {
                if let Some(gi) = grad_in {
                    for (g, d) in gi.iter_mut().zip(&head_input_grad) {
                        *g += d;
                    }
                }
            }
            Architecture::Graph => {
                let spec = self.embed.expect("graph models carry an embed layer");
                let z = &cache.head_acts[0];
                let mut gx = vec![0.0; NODE_COUNT * NODE_FEATURES];
                for v in 0..NODE_COUNT {
                    let uv = &cache.node_u[v * 2 * NODE_FEATURES..(v + 1) * 2 * NODE_FEATURES];
                    let mut gu = [0.0; 2 * NODE_FEATURES];
                    for r in 0..EMBED_DIM {
                        let zv = z[v * EMBED_DIM + r];
                        let dz = head_input_grad[v * EMBED_DIM + r] * (1.0 - zv * zv);
                        grad_w[spec.b_off + r] += dz;
                        let grow = &mut grad_w
                            [spec.w_off + r * spec.cols..spec.w_off + (r + 1) * spec.cols];
                        let wrow = &self.weights
                            [spec.w_off + r * spec.cols..spec.w_off + (r + 1) * spec.cols];
                        for c in 0..spec.cols {
                            grow[c] += dz * uv[c];
                            gu[c] += dz * wrow[c];
                        }
                    }
                    for f in 0..NODE_FEATURES {
                        gx[v * NODE_FEATURES + f] += gu[f];
                    }
                    let nbs = neighbors(v);
                    let inv = 1.0 / nbs.len() as f64;
                    for &nb in nbs {
                        for f in 0..NODE_FEATURES {
                            gx[nb * NODE_FEATURES + f] += gu[NODE_FEATURES + f] * inv;
                        }
                    }
                }
                if let Some(gi) = grad_in {
                    for v in 0..NODE_COUNT {
                        for f in 0..NODE_FEATURES {
                            if let Some(d) = feature_source(v, f) {
                                gi[d] += gx[v * NODE_FEATURES + f];
                            }
                        }
                    }
                }
            }
        }
        let _ = cache.theta; // inputs live in the cache for symmetry/debugging
    }

    /// Prediction plus gradients with respect to every weight and input.
    pub fn predict_with_gradients(&self, theta: &[f64]) -> Result<PredictionGradients> {
        let cache = self.forward_cache(theta)?;
        let value = cache.head_acts.last().expect("output present")[0];
        if !value.is_finite() {
            return Err(Error::InvalidArgument(
                "non-finite prediction: model weights are corrupt".into(),
            ));
        }
        let mut weights = vec![0.0; self.weights.len()];
        let mut input = vec![0.0; THETA_DIM];
        self.backward_into(&cache, 1.0, &mut weights, Some(&mut input));
        Ok(PredictionGradients { value, weights, input })
    }

    /// Training helper: accumulate dL/dw of one sample into `grad_w` given
    /// the upstream loss gradient, returning the prediction.
    pub(crate) fn accumulate_loss_gradient(
        &self,
        theta: &[f64],
        upstream: impl FnOnce(f64) -> f64,
        grad_w: &mut [f64],
    ) -> Result<f64> {
        let cache = self.forward_cache(theta)?;
        let value = cache.head_acts.last().expect("output present")[0];
        self.backward_into(&cache, upstream(value), grad_w, None);
        Ok(value)
    }

    // ---- serialization -------------------------------------------------

    /// Versioned flat binary: two human-readable header lines (magic, then
    /// architecture + hash), a little-endian weight count and weight block,
    /// and a trailing FNV-1a checksum of everything before it.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        buf.extend_from_slice(WEIGHTS_MAGIC.as_bytes());
        buf.push(b'\n');
        buf.extend_from_slice(
            format!(
                "arch={} hidden={} hash={:016x}\n",
                self.arch.name(),
                self.hidden.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","),
                self.architecture_hash()
            )
            .as_bytes(),
        );
        buf.extend_from_slice(&(self.weights.len() as u64).to_le_bytes());
        for w in &self.weights {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let checksum = fnv1a64(&buf);
        buf.extend_from_slice(&checksum.to_le_bytes());
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let corrupt = |msg: &str| Error::CorruptArtifact(format!("weights artifact: {msg}"));
        if bytes.len() < 8 {
            return Err(corrupt("truncated before the checksum"));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().expect("eight tail bytes"));
        if fnv1a64(body) != stored {
            return Err(corrupt("checksum mismatch"));
        }

        let newline = |buf: &[u8], what: &str| -> Result<usize> {
            buf.iter()
                .position(|&b| b == b'\n')
                .ok_or_else(|| corrupt(&format!("missing {what} line")))
        };
        let n0 = newline(body, "magic")?;
        if &body[..n0] != WEIGHTS_MAGIC.as_bytes() {
            return Err(corrupt("bad magic line"));
        }
        let rest = &body[n0 + 1..];
        let n1 = newline(rest, "architecture")?;
        let arch_line = std::str::from_utf8(&rest[..n1])
            .map_err(|_| corrupt("architecture line is not UTF-8"))?;
        let mut arch_name = None;
        let mut hidden: Vec<usize> = Vec::new();
        let mut stored_hash = None;
        for field in arch_line.split_whitespace() {
            let (key, value) =
                field.split_once('=').ok_or_else(|| corrupt("malformed architecture field"))?;
            match key {
                "arch" => arch_name = Some(value.to_string()),
                "hidden" => {
                    hidden = value
                        .split(',')
                        .map(|s| s.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| corrupt("bad hidden widths"))?;
                }
                "hash" => {
                    stored_hash = Some(
                        u64::from_str_radix(value, 16)
                            .map_err(|_| corrupt("bad architecture hash"))?,
                    );
                }
                _ => {} // tolerate additions from newer writers
            }
        }
        let arch = Architecture::parse(&arch_name.ok_or_else(|| corrupt("missing arch field"))?)?;
        let stored_hash = stored_hash.ok_or_else(|| corrupt("missing hash field"))?;

        let mut model = SurrogateModel::with_hidden(arch, &hidden, 0)
            .map_err(|e| corrupt(&format!("invalid architecture: {e}")))?;
        if model.architecture_hash() != stored_hash {
            return Err(corrupt("architecture hash mismatch"));
        }

        let payload = &rest[n1 + 1..];
        if payload.len() < 8 {
            return Err(corrupt("truncated weight count"));
        }
        let count = u64::from_le_bytes(payload[..8].try_into().expect("eight bytes")) as usize;
        if count != model.weights.len() {
            return Err(corrupt(&format!(
                "weight count {count} does not match architecture ({})",
                model.weights.len()
            )));
        }
        let data = &payload[8..];
        if data.len() != 8 * count {
            return Err(corrupt("weight block has the wrong length"));
        }
        for (i, chunk) in data.chunks_exact(8).enumerate() {
            let w = f64::from_le_bytes(chunk.try_into().expect("eight bytes"));
            if !w.is_finite() {
                return Err(corrupt(&format!("non-finite weight at index {i}")));
            }
            model.weights[i] = w;
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        SurrogateModel::from_bytes(&std::fs::read(path)?)
    }
}

impl Predictor for SurrogateModel {
    fn predict(&self, theta: &[f64]) -> Result<f64> {
        let cache = self.forward_cache(theta)?;
        let value = cache.head_acts.last().expect("output present")[0];
        if !value.is_finite() {
            return Err(Error::InvalidArgument(
                "non-finite prediction: model weights are corrupt".into(),
            ));
        }
        Ok(value)
    }
}

impl DifferentiablePredictor for SurrogateModel {
    fn value_and_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let grads = self.predict_with_gradients(theta)?;
        Ok((grads.value, grads.input))
    }
}
