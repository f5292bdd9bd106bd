//! Price panel loading and log-return conversion.
//!
//! Input files are UTF-8 CSV with a header row. The first column holds
//! ISO-8601 dates (`YYYY-MM-DD`) and must be named `date` (any case); every
//! other column is one asset. Cells are parsed with `.` as decimal separator
//! and no locale handling. Gaps are rejected rather than imputed.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DATE_FORMAT: &str = "%Y-%m-%d";
pub const MIN_ASSETS: usize = 4;

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Restrict the panel to these asset columns, in this order.
    pub assets: Option<Vec<String>>,
}

/// Strictly positive prices indexed by (date, asset).
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    values: DMatrix<f64>,
}

impl PricePanel {
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != dates.len() {
            return Err(Error::Dimension {
                expected: dates.len(),
                found: values.nrows(),
            });
        }
        if values.ncols() != assets.len() {
            return Err(Error::Dimension {
                expected: assets.len(),
                found: values.ncols(),
            });
        }
        if dates.len() < 2 || assets.len() < MIN_ASSETS {
            return Err(Error::PanelTooSmall {
                rows: dates.len(),
                assets: assets.len(),
            });
        }
        for w in 1..dates.len() {
            if dates[w] == dates[w - 1] {
                return Err(Error::DuplicateDate(
                    dates[w].format(DATE_FORMAT).to_string(),
                ));
            }
            if dates[w] < dates[w - 1] {
                return Err(Error::UnorderedDates(w));
            }
        }
        for row in 0..values.nrows() {
            for column in 0..values.ncols() {
                let value = values[(row, column)];
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::NonPositivePrice { row, column, value });
                }
            }
        }
        Ok(Self {
            dates,
            assets,
            values,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    /// Writes the panel in the same CSV layout [`load_price_panel`] reads.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = Vec::with_capacity(self.assets.len() + 1);
        header.push("date".to_string());
        header.extend(self.assets.iter().cloned());
        out.write_record(&header)?;
        for (t, date) in self.dates.iter().enumerate() {
            let mut record = Vec::with_capacity(self.assets.len() + 1);
            record.push(date.format(DATE_FORMAT).to_string());
            record.extend(self.values.row(t).iter().map(|v| format!("{v}")));
            out.write_record(&record)?;
        }
        out.flush().map_err(|source| Error::Io {
            path: "<writer>".into(),
            source,
        })?;
        Ok(())
    }
}

/// Log-returns `values[t][i] = ln(p[t+1][i] / p[t][i])`, one row per date
/// after the first price date.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    values: DMatrix<f64>,
}

impl ReturnsPanel {
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != dates.len() {
            return Err(Error::Dimension {
                expected: dates.len(),
                found: values.nrows(),
            });
        }
        if values.ncols() != assets.len() {
            return Err(Error::Dimension {
                expected: assets.len(),
                found: values.ncols(),
            });
        }
        for row in 0..values.nrows() {
            for column in 0..values.ncols() {
                if !values[(row, column)].is_finite() {
                    return Err(Error::NonFinite { row, column });
                }
            }
        }
        Ok(Self {
            dates,
            assets,
            values,
        })
    }

    /// Builds a panel with synthetic consecutive daily dates starting at
    /// 2000-01-03 and assets named `a0`, `a1`, ...
    pub fn from_matrix(values: DMatrix<f64>) -> Result<Self> {
        let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
        let dates = (0..values.nrows())
            .map(|t| start + chrono::Days::new(t as u64))
            .collect();
        let assets = (0..values.ncols()).map(|i| format!("a{i}")).collect();
        Self::new(dates, assets, values)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    /// The observation `X_t` as a column vector.
    pub fn observation(&self, t: usize) -> DVector<f64> {
        self.values.row(t).transpose()
    }

    /// Per-asset z-scoring over the whole panel (sample standard deviation).
    /// Constant columns are only centered.
    pub fn standardized(&self) -> Self {
        let t = self.values.nrows();
        let mut values = self.values.clone();
        for mut col in values.column_iter_mut() {
            let mean = col.sum() / t as f64;
            col.add_scalar_mut(-mean);
            let var = if t > 1 {
                col.norm_squared() / (t - 1) as f64
            } else {
                0.0
            };
            if var > 0.0 {
                col /= var.sqrt();
            }
        }
        Self {
            dates: self.dates.clone(),
            assets: self.assets.clone(),
            values,
        }
    }

    /// Equal-weight cross-sectional mean return per date.
    pub fn equal_weight_returns(&self) -> Vec<f64> {
        let n = self.values.ncols() as f64;
        self.values.row_iter().map(|r| r.sum() / n).collect()
    }
}

pub fn load_price_panel(path: impl AsRef<Path>, options: &IngestOptions) -> Result<PricePanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_price_panel(file, options)
}

/// Parses a price CSV from any reader. Rows may appear in any order and are
/// sorted by date. Error positions are 1-based file line and column numbers.
pub fn read_price_panel<R: Read>(reader: R, options: &IngestOptions) -> Result<PricePanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || !header[0].eq_ignore_ascii_case("date") {
        return Err(Error::Header(
            "first column must be named \"date\"".to_string(),
        ));
    }
    let all_assets: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    for (i, a) in all_assets.iter().enumerate() {
        if a.is_empty() {
            return Err(Error::Header(format!(
                "empty asset name in column {}",
                i + 2
            )));
        }
        if all_assets[..i].contains(a) {
            return Err(Error::Header(format!("duplicate asset {a}")));
        }
    }
    let selection: Vec<usize> = match &options.assets {
        None => (0..all_assets.len()).collect(),
        Some(wanted) => wanted
            .iter()
            .map(|w| {
                all_assets
                    .iter()
                    .position(|a| a == w)
                    .ok_or_else(|| Error::Header(format!("asset {w} not found")))
            })
            .collect::<Result<_>>()?,
    };
    let assets: Vec<String> = selection.iter().map(|&i| all_assets[i].clone()).collect();

    let mut rows: Vec<(NaiveDate, Vec<f64>)> = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let line = idx + 2;
        if record.len() != header.len() {
            return Err(Error::Malformed {
                row: line,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let date =
            NaiveDate::parse_from_str(&record[0], DATE_FORMAT).map_err(|e| Error::Malformed {
                row: line,
                column: 1,
                message: format!("bad date {:?}: {e}", &record[0]),
            })?;
        let mut prices = Vec::with_capacity(selection.len());
        for &i in &selection {
            let cell = &record[i + 1];
            let column = i + 2;
            if cell.is_empty() {
                return Err(Error::MissingValue { row: line, column });
            }
            let value: f64 = cell.parse().map_err(|_| Error::Malformed {
                row: line,
                column,
                message: format!("not a number: {cell:?}"),
            })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositivePrice {
                    row: line,
                    column,
                    value,
                });
            }
            prices.push(value);
        }
        rows.push((date, prices));
    }
    rows.sort_by_key(|(d, _)| *d);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateDate(w[0].0.format(DATE_FORMAT).to_string()));
        }
    }
    if rows.len() < 2 || assets.len() < MIN_ASSETS {
        return Err(Error::PanelTooSmall {
            rows: rows.len(),
            assets: assets.len(),
        });
    }
    let n = assets.len();
    let values = DMatrix::from_fn(rows.len(), n, |t, i| rows[t].1[i]);
    let dates = rows.into_iter().map(|(d, _)| d).collect();
    PricePanel::new(dates, assets, values)
}

pub fn to_log_returns(panel: &PricePanel) -> ReturnsPanel {
    let p = panel.values();
    let t = p.nrows() - 1;
    let values = DMatrix::from_fn(t, p.ncols(), |r, c| (p[(r + 1, c)] / p[(r, c)]).ln());
    ReturnsPanel {
        dates: panel.dates()[1..].to_vec(),
        assets: panel.assets().to_vec(),
        values,
    }
}
