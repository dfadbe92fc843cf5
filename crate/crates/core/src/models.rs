//! Model objects for the key-agreement setup: the correlated source triple,
//! the two-input three-output channel, auxiliary-variable configurations,
//! and the composition rules that produce the joint laws every rate bound
//! is evaluated on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::{Axis, CondPMF, JointPMF, ProbError};

pub const S1: &str = "S1";
pub const S2: &str = "S2";
pub const S3: &str = "S3";
pub const U1: &str = "U1";
pub const U2: &str = "U2";
pub const V1: &str = "V1";
pub const V2: &str = "V2";
pub const X1: &str = "X1";
pub const X2: &str = "X2";
pub const Y1: &str = "Y1";
pub const Y2: &str = "Y2";
pub const Y3: &str = "Y3";

/// Structural checks use this tolerance by default: these are structural
/// zeros, not statistical estimates.
pub const STRUCTURAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("source must have exactly the axes S1, S2, S3; got {0:?}")]
    BadSourceAxes(Vec<String>),
    #[error("channel must map (X1, X2) to (Y1, Y2, Y3); got {got} axes")]
    BadChannelShape { got: usize },
    #[error("{context}: expected length {expected}, got {got}")]
    BadLength {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("input law must have full support on the declared alphabet")]
    InputLawNotFullSupport,
    #[error(transparent)]
    Prob(#[from] ProbError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Joint law of the three users' source observations, axes (S1, S2, S3).
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    joint: JointPMF,
}

impl SourceModel {
    /// Accepts a table with axes named S1, S2, S3 in any order and
    /// normalizes the order to (S1, S2, S3).
    pub fn new(joint: JointPMF) -> Result<Self> {
        let names: Vec<String> = joint.axes().iter().map(|a| a.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        if sorted != [S1, S2, S3] {
            return Err(ModelError::BadSourceAxes(names));
        }
        let joint = joint.reorder(&[S1, S2, S3])?;
        Ok(SourceModel { joint })
    }

    /// S3 is a fair bit, S1 and S2 are S3 seen through independent binary
    /// symmetric flips, so S1 - S3 - S2 holds by construction.
    pub fn binary_symmetric_triple(flip1: f64, flip2: f64) -> Result<Self> {
        let s3 = JointPMF::from_marginal(S3, &[0.5, 0.5])?;
        let bsc = |f: f64, to: &str| {
            CondPMF::from_rows(
                Axis::new(S3, 2),
                Axis::new(to, 2),
                &[vec![1.0 - f, f], vec![f, 1.0 - f]],
            )
        };
        let joint = s3
            .extend(&bsc(flip1, S1)?, &[S3])?
            .extend(&bsc(flip2, S2)?, &[S3])?;
        SourceModel::new(joint)
    }

    pub fn joint(&self) -> &JointPMF {
        &self.joint
    }

    pub fn sizes(&self) -> [usize; 3] {
        let a = self.joint.axes();
        [a[0].size, a[1].size, a[2].size]
    }
}

/// The channel law p(y1, y2, y3 | x1, x2), independent of the sources.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    law: CondPMF,
}

impl ChannelModel {
    pub fn new(law: CondPMF) -> Result<Self> {
        if law.from_axes().len() != 2 || law.to_axes().len() != 3 {
            return Err(ModelError::BadChannelShape {
                got: law.from_axes().len() + law.to_axes().len(),
            });
        }
        let law = law.with_axis_names(&[X1, X2], &[Y1, Y2, Y3])?;
        Ok(ChannelModel { law })
    }

    /// Builds the law from the wire layout: one row per (x1, x2) pair in
    /// row-major order, each row over (y1, y2, y3) with y3 fastest.
    pub fn from_tables(from_sizes: [usize; 2], to_sizes: [usize; 3], rows: Vec<f64>) -> Result<Self> {
        let law = CondPMF::new(
            vec![Axis::new(X1, from_sizes[0]), Axis::new(X2, from_sizes[1])],
            vec![
                Axis::new(Y1, to_sizes[0]),
                Axis::new(Y2, to_sizes[1]),
                Axis::new(Y3, to_sizes[2]),
            ],
            rows,
        )?;
        Ok(ChannelModel { law })
    }

    /// Noise-free channel given by an explicit output map.
    pub fn deterministic(
        from_sizes: [usize; 2],
        to_sizes: [usize; 3],
        f: impl Fn(usize, usize) -> (usize, usize, usize),
    ) -> Result<Self> {
        let row_len = to_sizes.iter().product::<usize>();
        let mut rows = vec![0.0; from_sizes[0] * from_sizes[1] * row_len];
        for a in 0..from_sizes[0] {
            for b in 0..from_sizes[1] {
                let (y1, y2, y3) = f(a, b);
                let flat = (y1 * to_sizes[1] + y2) * to_sizes[2] + y3;
                rows[(a * from_sizes[1] + b) * row_len + flat] = 1.0;
            }
        }
        Self::from_tables(from_sizes, to_sizes, rows)
    }

    /// Y3 identifies the input pair exactly and both transmitters hear Y3
    /// too. This is the canonical invertible noiseless instance.
    pub fn noiseless_pair(nx1: usize, nx2: usize) -> Result<Self> {
        let ny = nx1 * nx2;
        Self::deterministic([nx1, nx2], [ny, ny, ny], move |a, b| {
            let y = a * nx2 + b;
            (y, y, y)
        })
    }

    pub fn law(&self) -> &CondPMF {
        &self.law
    }

    pub fn input_sizes(&self) -> [usize; 2] {
        [self.law.from_axes()[0].size, self.law.from_axes()[1].size]
    }

    pub fn output_sizes(&self) -> [usize; 3] {
        [
            self.law.to_axes()[0].size,
            self.law.to_axes()[1].size,
            self.law.to_axes()[2].size,
        ]
    }
}

/// The conditional laws the achievable region is optimized over: auxiliary
/// source descriptions U_i given S_i, and the channel prefix V_i -> X_i with
/// independent V_1, V_2.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryConfig {
    pub pu1_given_s1: CondPMF,
    pub pu2_given_s2: CondPMF,
    pub pv1: JointPMF,
    pub pv2: JointPMF,
    pub px1_given_v1: CondPMF,
    pub px2_given_v2: CondPMF,
}

/// Alphabet sizes of the four auxiliary variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSizes {
    pub u1: usize,
    pub u2: usize,
    pub v1: usize,
    pub v2: usize,
}

impl AuxiliaryConfig {
    /// Assembles a configuration from raw rows; alphabet sizes are inferred
    /// from the row shapes.
    pub fn from_parts(
        u1_rows: &[Vec<f64>],
        u2_rows: &[Vec<f64>],
        pv1: &[f64],
        pv2: &[f64],
        x1_rows: &[Vec<f64>],
        x2_rows: &[Vec<f64>],
    ) -> Result<Self> {
        let kernel = |rows: &[Vec<f64>], from: &str, to: &str| -> Result<CondPMF> {
            let width = rows.first().map(|r| r.len()).unwrap_or(0);
            Ok(CondPMF::from_rows(
                Axis::new(from, rows.len()),
                Axis::new(to, width),
                rows,
            )?)
        };
        Ok(AuxiliaryConfig {
            pu1_given_s1: kernel(u1_rows, S1, U1)?,
            pu2_given_s2: kernel(u2_rows, S2, U2)?,
            pv1: JointPMF::from_marginal(V1, pv1)?,
            pv2: JointPMF::from_marginal(V2, pv2)?,
            px1_given_v1: kernel(x1_rows, V1, X1)?,
            px2_given_v2: kernel(x2_rows, V2, X2)?,
        })
    }

    /// U_i = S_i and V_i = X_i with the given channel input laws.
    pub fn identity(src: &SourceModel, ch: &ChannelModel, px1: &[f64], px2: &[f64]) -> Result<Self> {
        let [ns1, ns2, _] = src.sizes();
        let [nx1, nx2] = ch.input_sizes();
        if px1.len() != nx1 {
            return Err(ModelError::BadLength {
                context: "px1",
                expected: nx1,
                got: px1.len(),
            });
        }
        if px2.len() != nx2 {
            return Err(ModelError::BadLength {
                context: "px2",
                expected: nx2,
                got: px2.len(),
            });
        }
        Ok(AuxiliaryConfig {
            pu1_given_s1: CondPMF::identity(Axis::new(S1, ns1), U1),
            pu2_given_s2: CondPMF::identity(Axis::new(S2, ns2), U2),
            pv1: JointPMF::from_marginal(V1, px1)?,
            pv2: JointPMF::from_marginal(V2, px2)?,
            px1_given_v1: CondPMF::identity(Axis::new(V1, nx1), X1),
            px2_given_v2: CondPMF::identity(Axis::new(V2, nx2), X2),
        })
    }

    /// Single-symbol U and V alphabets; the channel inputs are drawn from
    /// the given laws regardless. The degenerate always-feasible scheme.
    pub fn constant(src: &SourceModel, ch: &ChannelModel, px1: &[f64], px2: &[f64]) -> Result<Self> {
        let [ns1, ns2, _] = src.sizes();
        let _ = ch;
        AuxiliaryConfig::from_parts(
            &vec![vec![1.0]; ns1],
            &vec![vec![1.0]; ns2],
            &[1.0],
            &[1.0],
            &[px1.to_vec()],
            &[px2.to_vec()],
        )
    }

    pub fn sizes(&self) -> AuxSizes {
        AuxSizes {
            u1: self.pu1_given_s1.to_axes()[0].size,
            u2: self.pu2_given_s2.to_axes()[0].size,
            v1: self.pv1.axes()[0].size,
            v2: self.pv2.axes()[0].size,
        }
    }
}

/// p(u1, u2, s1, s2, s3) = p(u1|s1) p(u2|s2) p(s1, s2, s3), with axes
/// ordered (U1, U2, S1, S2, S3).
pub fn source_aux_joint(src: &SourceModel, aux: &AuxiliaryConfig) -> Result<JointPMF> {
    let joint = src
        .joint()
        .extend(&aux.pu1_given_s1, &[S1])?
        .extend(&aux.pu2_given_s2, &[S2])?
        .reorder(&[U1, U2, S1, S2, S3])?;
    Ok(joint)
}

/// p(v1, v2, x1, x2, y1, y2, y3) = p(v1) p(v2) p(x1|v1) p(x2|v2)
/// p(y1, y2, y3 | x1, x2), with axes ordered (V1, V2, X1, X2, Y1, Y2, Y3).
pub fn channel_aux_joint(ch: &ChannelModel, aux: &AuxiliaryConfig) -> Result<JointPMF> {
    let joint = aux
        .pv1
        .product(&aux.pv2)?
        .extend(&aux.px1_given_v1, &[V1])?
        .extend(&aux.px2_given_v2, &[V2])?
        .extend(ch.law(), &[X1, X2])?;
    Ok(joint)
}

/// Product input law used by structural channel checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductInputLaw {
    pub px1: Vec<f64>,
    pub px2: Vec<f64>,
}

impl ProductInputLaw {
    pub fn uniform(ch: &ChannelModel) -> Self {
        let [nx1, nx2] = ch.input_sizes();
        ProductInputLaw {
            px1: vec![1.0 / nx1 as f64; nx1],
            px2: vec![1.0 / nx2 as f64; nx2],
        }
    }

    fn joint_with(&self, ch: &ChannelModel) -> Result<JointPMF> {
        if self.px1.iter().any(|&p| p <= 0.0) || self.px2.iter().any(|&p| p <= 0.0) {
            return Err(ModelError::InputLawNotFullSupport);
        }
        let p = JointPMF::from_marginal(X1, &self.px1)?
            .product(&JointPMF::from_marginal(X2, &self.px2)?)?
            .extend(ch.law(), &[X1, X2])?;
        Ok(p)
    }
}

/// Outcome of the structural preconditions for the capacity special case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialCaseReport {
    /// (X1, X2) - Y1 - Y3 under the supplied input law.
    pub markov_y1: bool,
    /// (X1, X2) - Y2 - Y3 under the supplied input law.
    pub markov_y2: bool,
    /// S1 - S3 - S2.
    pub markov_sources: bool,
    /// H(X1 | X2, Y3) vanishes under the supplied input law.
    pub det_x1: bool,
    /// H(X2 | X1, Y3) vanishes under the supplied input law.
    pub det_x2: bool,
}

impl SpecialCaseReport {
    pub fn all_ok(&self) -> bool {
        self.markov_y1 && self.markov_y2 && self.markov_sources && self.det_x1 && self.det_x2
    }

    pub fn violated(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.markov_y1 {
            out.push("(X1,X2)-Y1-Y3");
        }
        if !self.markov_y2 {
            out.push("(X1,X2)-Y2-Y3");
        }
        if !self.markov_sources {
            out.push("S1-S3-S2");
        }
        if !self.det_x1 {
            out.push("H(X1|X2,Y3)=0");
        }
        if !self.det_x2 {
            out.push("H(X2|X1,Y3)=0");
        }
        out
    }
}

/// Tests the special-case structure. The channel-side conditions depend on
/// the input distribution in general, so they are evaluated under the
/// supplied full-support product law and reported as-is.
pub fn check_special_case(
    src: &SourceModel,
    ch: &ChannelModel,
    input: &ProductInputLaw,
    tol: f64,
) -> Result<SpecialCaseReport> {
    let p = input.joint_with(ch)?;
    let markov_y1 = p.is_markov(&[X1, X2], &[Y1], &[Y3], tol)?;
    let markov_y2 = p.is_markov(&[X1, X2], &[Y2], &[Y3], tol)?;
    let det_x1 = p.cond_entropy(&[X1], &[X2, Y3])? <= tol;
    let det_x2 = p.cond_entropy(&[X2], &[X1, Y3])? <= tol;
    let markov_sources = src.joint().is_markov(&[S1], &[S3], &[S2], tol)?;
    Ok(SpecialCaseReport {
        markov_y1,
        markov_y2,
        markov_sources,
        det_x1,
        det_x2,
    })
}

/// On-disk model description: a source table, a channel law, and optionally
/// a pinned auxiliary configuration for the simulator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub source: JointPMF,
    pub channel: ChannelJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<AuxJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub from_sizes: [usize; 2],
    pub to_sizes: [usize; 3],
    pub rows: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuxJson {
    pub u1_rows: Vec<Vec<f64>>,
    pub u2_rows: Vec<Vec<f64>>,
    pub pv1: Vec<f64>,
    pub pv2: Vec<f64>,
    pub x1_rows: Vec<Vec<f64>>,
    pub x2_rows: Vec<Vec<f64>>,
}

impl ModelFile {
    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_models(src: &SourceModel, ch: &ChannelModel) -> Self {
        ModelFile {
            source: src.joint().clone(),
            channel: ChannelJson {
                from_sizes: ch.input_sizes(),
                to_sizes: ch.output_sizes(),
                rows: ch.law().rows_flat().to_vec(),
            },
            aux: None,
        }
    }

    pub fn source_model(&self) -> Result<SourceModel> {
        SourceModel::new(self.source.clone())
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        ChannelModel::from_tables(
            self.channel.from_sizes,
            self.channel.to_sizes,
            self.channel.rows.clone(),
        )
    }

    pub fn aux_config(&self) -> Result<Option<AuxiliaryConfig>> {
        match &self.aux {
            None => Ok(None),
            Some(a) => Ok(Some(AuxiliaryConfig::from_parts(
                &a.u1_rows, &a.u2_rows, &a.pv1, &a.pv2, &a.x1_rows, &a.x2_rows,
            )?)),
        }
    }
}
