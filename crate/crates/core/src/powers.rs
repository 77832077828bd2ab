use crate::error::{Error, Result};

/// Transmit powers `p_{i,k}` of every user, cell-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Powers {
    values: Vec<f64>,
    users_per_cell: usize,
}

impl Powers {
    pub fn new(values: Vec<f64>, users_per_cell: usize) -> Result<Self> {
        if users_per_cell == 0 || !values.len().is_multiple_of(users_per_cell) {
            return Err(Error::Domain(format!(
                "{} power values do not form whole cells of {} users",
                values.len(),
                users_per_cell
            )));
        }
        if values.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Domain("powers must be finite and nonnegative".into()));
        }
        Ok(Powers {
            values,
            users_per_cell,
        })
    }

    pub fn uniform(cells: usize, users_per_cell: usize, p: f64) -> Self {
        Powers {
            values: vec![p; cells * users_per_cell],
            users_per_cell,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.users_per_cell + k]
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        &self.values[i * self.users_per_cell..(i + 1) * self.users_per_cell]
    }

    pub fn cells(&self) -> usize {
        self.values.len() / self.users_per_cell
    }

    pub fn users_per_cell(&self) -> usize {
        self.users_per_cell
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Powers {
            values: self.values.iter().map(|p| p * factor).collect(),
            users_per_cell: self.users_per_cell,
        }
    }
}
