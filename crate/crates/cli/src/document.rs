use activation_robustness::linalg::Matrix;
use activation_robustness::states::validate_density;
use activation_robustness::{BipartiteSpace, DensityMatrix, FourPartySpace};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use std::path::Path;

use crate::error::CliError;

/// Wire format for a matrix on `C^dimA (x) C^dimB`, row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MatrixDocument {
    pub dims: [usize; 2],
    #[serde(deserialize_with = "pairs")]
    pub matrix: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub four_party: Option<FourPartyDims>,
}

fn pairs<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<[f64; 2]>, D::Error> {
    let raw = Vec::<Vec<f64>>::deserialize(de)?;
    raw.into_iter()
        .enumerate()
        .map(|(k, z)| match z[..] {
            [re, im] => Ok([re, im]),
            _ => Err(D::Error::custom(format!(
                "matrix[{k}]: expected an [re, im] pair, found {} numbers",
                z.len()
            ))),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourPartyDims {
    pub m: usize,
    pub d: usize,
}

impl MatrixDocument {
    pub fn from_matrix(m: &Matrix<f64>, space: BipartiteSpace) -> Self {
        Self {
            dims: [space.dim_a, space.dim_b],
            matrix: m.data().iter().map(|z| [z.re, z.im]).collect(),
            four_party: None,
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn space(&self) -> Result<BipartiteSpace, CliError> {
        let [a, b] = self.dims;
        if a.checked_mul(b).and_then(|n| n.checked_mul(n)).is_none() {
            return Err(CliError::Input(format!("dims: [{a}, {b}] is too large")));
        }
        BipartiteSpace::new(a, b).map_err(|e| CliError::Input(format!("dims: {e}")))
    }

    pub fn to_matrix(&self) -> Result<Matrix<f64>, CliError> {
        let n = self.space()?.total();
        if self.matrix.len() != n * n {
            return Err(CliError::Input(format!(
                "matrix: expected {} entries for dims {:?}, found {}",
                n * n,
                self.dims,
                self.matrix.len()
            )));
        }
        let data = self.matrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Matrix::new(n, n, data).map_err(|e| CliError::Input(format!("matrix: {e}")))
    }

    /// Parses and validates the document as a density matrix.
    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        let space = self.space()?;
        validate_density(self.to_matrix()?, space).map_err(|e| CliError::Input(format!("matrix: {e}")))
    }

    pub fn four_party_space(&self) -> Result<FourPartySpace, CliError> {
        let dims = self
            .four_party
            .ok_or_else(|| CliError::Input("fourParty: required for the activation resource".into()))?;
        let fp = FourPartySpace::new(dims.m, dims.d).map_err(|e| CliError::Input(format!("fourParty: {e}")))?;
        let expected = dims.m * dims.d;
        if self.dims != [expected, expected] {
            return Err(CliError::Input(format!(
                "fourParty: {{m: {}, d: {}}} needs dims [{expected}, {expected}], found {:?}",
                dims.m, dims.d, self.dims
            )));
        }
        Ok(fp)
    }
}
