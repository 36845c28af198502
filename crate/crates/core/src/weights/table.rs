//! Weight tables keyed by canonical graph class, with CSV persistence.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::analytic::analytic_weight;
use super::montecarlo::mc_weight;
use crate::error::{Error, Result};
use crate::graphs::{canonical_form, dedup_isomorphism, enumerate, AdmissibleGraph, EnumerateOptions, GraphKey};

/// One CSV row: the weight of the canonical representative of a class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightRow {
    pub graph_key: String,
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    /// Exact value when the class belongs to a closed-form family.
    pub analytic: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightTable {
    rows: BTreeMap<GraphKey, WeightRow>,
}

impl WeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &WeightRow> {
        self.rows.values()
    }

    pub fn insert(&mut self, row: WeightRow) -> Result<()> {
        let key: GraphKey = row.graph_key.parse()?;
        self.rows.insert(key, row);
        Ok(())
    }

    pub fn get(&self, key: &GraphKey) -> Option<&WeightRow> {
        self.rows.get(key)
    }

    /// (mean, std_error) of W(g), with the sign relating g to its class representative.
    pub fn lookup(&self, g: &AdmissibleGraph) -> Option<(f64, f64)> {
        let cf = canonical_form(g);
        let row = self.rows.get(&cf.key)?;
        Some((cf.weight_sign as f64 * row.mean, row.std_error))
    }

    pub fn to_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.rows.values() {
            w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads rows written by [`WeightTable::to_csv`]; lines starting with `#` are ignored.
    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let mut table = WeightTable::new();
        for row in csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input).deserialize() {
            table.insert(row.map_err(|e| Error::Parse(e.to_string()))?)?;
        }
        Ok(table)
    }
}

/// Estimates one weight per isomorphism class of connected graphs in G_{n,2} with out-degree 2.
pub fn estimate_table(n: usize, samples: u64, seed: u64) -> Result<WeightTable> {
    let graphs = enumerate(n, 2, &vec![2; n], EnumerateOptions::default())?;
    let mut table = WeightTable::new();
    for (key, _) in dedup_isomorphism(&graphs) {
        let rep = AdmissibleGraph::from_encoded(key.n, key.m, &key.stars)?;
        let cf = canonical_form(&rep);
        let analytic = analytic_weight(&rep);
        let (mean, std_error) = if cf.weight_sign == 0 {
            (0.0, 0.0)
        } else {
            let e = mc_weight(&rep, samples, seed)?;
            (e.mean, e.std_error)
        };
        table.insert(WeightRow {
            graph_key: key.to_string(),
            mean,
            std_error,
            samples,
            seed,
            analytic: analytic.map(|a| a.to_string()),
        })?;
    }
    Ok(table)
}
