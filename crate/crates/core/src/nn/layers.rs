use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis, Zip};

use super::spec::Activation;

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Fully connected layer `a = act(x W^T + b)`; `W` is `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

/// Forward intermediates of a dense layer.
#[derive(Debug, Clone)]
pub struct DenseCache {
    pub input: Array2<f64>,
    pub output: Array2<f64>,
}

impl Dense {
    pub fn zeros(input: usize, output: usize, activation: Activation) -> Self {
        Dense {
            weights: Array2::zeros((output, input)),
            bias: Array1::zeros(output),
            activation,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn forward(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut z = x.dot(&self.weights.t());
        z += &self.bias;
        match self.activation {
            Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
            Activation::Tanh => z.mapv_inplace(f64::tanh),
            Activation::Linear => {}
        }
        z
    }

    pub fn forward_cached(&self, x: Array2<f64>) -> DenseCache {
        let output = self.forward(x.view());
        DenseCache { input: x, output }
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dx`.
    pub fn backward(&self, cache: &DenseCache, mut d_out: Array2<f64>, grad: &mut Dense) -> Array2<f64> {
        match self.activation {
            Activation::Relu => Zip::from(&mut d_out).and(&cache.output).for_each(|d, &a| {
                if a <= 0.0 {
                    *d = 0.0
                }
            }),
            Activation::Tanh => Zip::from(&mut d_out)
                .and(&cache.output)
                .for_each(|d, &a| *d *= 1.0 - a * a),
            Activation::Linear => {}
        }
        general_mat_mul(1.0, &d_out.t(), &cache.input, 1.0, &mut grad.weights);
        grad.bias += &d_out.sum_axis(Axis(0));
        d_out.dot(&self.weights)
    }
}

/// LSTM layer with gates computed from the concatenation `[h_{t-1}, s_t]`.
///
/// `weights` is `4H x (H + I)` with row blocks in gate order forget, input,
/// candidate, output; `bias` is `4H` in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct Lstm {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub hidden: usize,
    pub input: usize,
}

/// Per-step activations kept for backpropagation through time.
#[derive(Debug, Clone)]
pub struct LstmCache {
    pub concat: Vec<Array2<f64>>,
    /// Activated gates `[F, I, C_bar, O]`, `B x 4H`.
    pub gates: Vec<Array2<f64>>,
    pub cells: Vec<Array2<f64>>,
    pub tanh_cells: Vec<Array2<f64>>,
    /// Hidden states `h_1 .. h_k`.
    pub hidden: Vec<Array2<f64>>,
}

pub const FORGET: usize = 0;
pub const INPUT: usize = 1;
pub const CANDIDATE: usize = 2;
pub const OUTPUT: usize = 3;

impl Lstm {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Lstm {
            weights: Array2::zeros((4 * hidden, hidden + input)),
            bias: Array1::zeros(4 * hidden),
            hidden,
            input,
        }
    }

    /// Runs the sequence from `h_0 = 0`, `C_0 = 0`.
    pub fn forward(&self, inputs: &[ArrayView2<'_, f64>]) -> LstmCache {
        let h = self.hidden;
        let batch = inputs.first().map_or(0, |x| x.nrows());
        let steps = inputs.len();
        let mut cache = LstmCache {
            concat: Vec::with_capacity(steps),
            gates: Vec::with_capacity(steps),
            cells: Vec::with_capacity(steps),
            tanh_cells: Vec::with_capacity(steps),
            hidden: Vec::with_capacity(steps),
        };
        let mut h_prev = Array2::<f64>::zeros((batch, h));
        let mut c_prev = Array2::<f64>::zeros((batch, h));
        for x in inputs {
            assert_eq!(x.ncols(), self.input, "LSTM input width mismatch");
            let mut concat = Array2::<f64>::zeros((batch, h + self.input));
            concat.slice_mut(s![.., ..h]).assign(&h_prev);
            concat.slice_mut(s![.., h..]).assign(x);
            let mut z = concat.dot(&self.weights.t());
            z += &self.bias;
            for mut row in z.rows_mut() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if j / h == CANDIDATE { v.tanh() } else { sigmoid(*v) };
                }
            }
            let mut c = Array2::<f64>::zeros((batch, h));
            let mut tc = Array2::<f64>::zeros((batch, h));
            let mut hn = Array2::<f64>::zeros((batch, h));
            for b in 0..batch {
                let g = z.row(b);
                for j in 0..h {
                    let f = g[FORGET * h + j];
                    let i = g[INPUT * h + j];
                    let cb = g[CANDIDATE * h + j];
                    let o = g[OUTPUT * h + j];
                    let cv = f * c_prev[[b, j]] + i * cb;
                    let t = cv.tanh();
                    c[[b, j]] = cv;
                    tc[[b, j]] = t;
                    hn[[b, j]] = o * t;
                }
            }
            h_prev = hn.clone();
            c_prev = c.clone();
            cache.concat.push(concat);
            cache.gates.push(z);
            cache.cells.push(c);
            cache.tanh_cells.push(tc);
            cache.hidden.push(hn);
        }
        cache
    }

    /// Backpropagation through time.
    ///
    /// `d_hidden[t]` is the loss gradient arriving at `h_t` from above (zero
    /// where the step's output is unused). Returns the gradients with
    /// respect to each step's input.
    pub fn backward(&self, cache: &LstmCache, d_hidden: &[Array2<f64>], grad: &mut Lstm) -> Vec<Array2<f64>> {
        let h = self.hidden;
        let steps = cache.hidden.len();
        let batch = cache.hidden.first().map_or(0, |x| x.nrows());
        let mut dh_next = Array2::<f64>::zeros((batch, h));
        let mut dc_next = Array2::<f64>::zeros((batch, h));
        let mut d_inputs = vec![Array2::<f64>::zeros((0, 0)); steps];
        let mut dz = Array2::<f64>::zeros((batch, 4 * h));
        for t in (0..steps).rev() {
            let gates = &cache.gates[t];
            let tc = &cache.tanh_cells[t];
            for b in 0..batch {
                for j in 0..h {
                    let f = gates[[b, FORGET * h + j]];
                    let i = gates[[b, INPUT * h + j]];
                    let cb = gates[[b, CANDIDATE * h + j]];
                    let o = gates[[b, OUTPUT * h + j]];
                    let c_prev = if t > 0 { cache.cells[t - 1][[b, j]] } else { 0.0 };
                    let dh = d_hidden[t][[b, j]] + dh_next[[b, j]];
                    let tcv = tc[[b, j]];
                    let d_o = dh * tcv;
                    let dc = dh * o * (1.0 - tcv * tcv) + dc_next[[b, j]];
                    let d_f = dc * c_prev;
                    let d_i = dc * cb;
                    let d_cb = dc * i;
                    dc_next[[b, j]] = dc * f;
                    dz[[b, FORGET * h + j]] = d_f * f * (1.0 - f);
                    dz[[b, INPUT * h + j]] = d_i * i * (1.0 - i);
                    dz[[b, CANDIDATE * h + j]] = d_cb * (1.0 - cb * cb);
                    dz[[b, OUTPUT * h + j]] = d_o * o * (1.0 - o);
                }
            }
            general_mat_mul(1.0, &dz.t(), &cache.concat[t], 1.0, &mut grad.weights);
            grad.bias += &dz.sum_axis(Axis(0));
            let d_concat = dz.dot(&self.weights);
            dh_next.assign(&d_concat.slice(s![.., ..h]));
            d_inputs[t] = d_concat.slice(s![.., h..]).to_owned();
        }
        d_inputs
    }
}
