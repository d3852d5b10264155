use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Linear,
}

impl Activation {
    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::Config(format!("unknown activation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseSpec {
    pub width: usize,
    pub activation: Activation,
}

impl DenseSpec {
    pub fn relu(width: usize) -> Self {
        DenseSpec {
            width,
            activation: Activation::Relu,
        }
    }

    pub fn linear(width: usize) -> Self {
        DenseSpec {
            width,
            activation: Activation::Linear,
        }
    }
}

/// Layer layout of the three-stage network.
///
/// Stage 1 is a dense stack applied to every time slice with shared
/// weights, stage 2 a stack of LSTM layers over the slices, stage 3 a dense
/// stack on the last hidden state of the final LSTM layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    pub input_features: usize,
    pub seq_len: usize,
    pub stage1: Vec<DenseSpec>,
    pub stage2: Vec<usize>,
    pub stage3: Vec<DenseSpec>,
}

impl NetworkSpec {
    /// Single-output layout: TDDL 32 -> LSTM 64/32/32 -> dense 10 -> 1.
    pub fn heat_default(input_features: usize, seq_len: usize) -> Self {
        NetworkSpec {
            input_features,
            seq_len,
            stage1: vec![DenseSpec::relu(32)],
            stage2: vec![64, 32, 32],
            stage3: vec![DenseSpec::relu(10), DenseSpec::linear(1)],
        }
    }

    /// Two-output layout: TDDL 32/64 -> LSTM 64/32/32 -> dense 10 -> `outputs`.
    pub fn flow_default(input_features: usize, seq_len: usize, outputs: usize) -> Self {
        NetworkSpec {
            input_features,
            seq_len,
            stage1: vec![DenseSpec::relu(32), DenseSpec::relu(64)],
            stage2: vec![64, 32, 32],
            stage3: vec![DenseSpec::relu(10), DenseSpec::linear(outputs)],
        }
    }

    pub fn outputs(&self) -> usize {
        self.stage3.last().map_or(0, |d| d.width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_features == 0 || self.seq_len == 0 {
            return Err(Error::Config(
                "input feature length and sequence length must be >= 1".into(),
            ));
        }
        if self.stage2.is_empty() || self.stage3.is_empty() {
            return Err(Error::Config(
                "network needs at least one LSTM and one output layer".into(),
            ));
        }
        let zero = self
            .stage1
            .iter()
            .map(|d| d.width)
            .chain(self.stage2.iter().copied())
            .chain(self.stage3.iter().map(|d| d.width))
            .any(|w| w == 0);
        if zero {
            return Err(Error::Config("all layer widths must be >= 1".into()));
        }
        Ok(())
    }

    /// Checks the output width against the number of target components.
    pub fn check_outputs(&self, components: usize) -> Result<()> {
        if self.outputs() != components {
            return Err(Error::Shape(format!(
                "network emits {} components, targets have {components}",
                self.outputs()
            )));
        }
        Ok(())
    }

    pub fn encode_dense(stack: &[DenseSpec]) -> String {
        stack
            .iter()
            .map(|d| format!("{}:{}", d.width, d.activation.as_str()))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn decode_dense(raw: &str) -> Result<Vec<DenseSpec>> {
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|item| {
                let (w, a) = item.split_once(':').unwrap_or((item, "relu"));
                let width = w
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad layer width `{w}`")))?;
                Ok(DenseSpec {
                    width,
                    activation: Activation::parse(a)?,
                })
            })
            .collect()
    }
}
