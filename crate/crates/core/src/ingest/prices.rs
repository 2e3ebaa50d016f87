use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub close: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
}

impl PricePoint {
    pub fn close_only(date: NaiveDate, close: f64) -> Self {
        PricePoint {
            date,
            close,
            open: None,
            high: None,
            low: None,
        }
    }
}

/// Daily prices with strictly increasing dates and positive values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceSeries {
    points: Vec<PricePoint>,
}

impl PriceSeries {
    /// Sorts by date, then rejects duplicates and non-positive prices.
    pub fn new(mut points: Vec<PricePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NoInput("price series".into()));
        }
        points.sort_by_key(|p| p.date);
        for w in points.windows(2) {
            if w[0].date == w[1].date {
                return Err(Error::DuplicateDate(w[1].date));
            }
        }
        for p in &points {
            for v in [Some(p.close), p.open, p.high, p.low].into_iter().flatten() {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::NonPositivePrice {
                        date: p.date,
                        value: v,
                    });
                }
            }
        }
        Ok(PriceSeries { points })
    }

    pub fn from_closes(dates: &[NaiveDate], closes: &[f64]) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(Error::LengthMismatch {
                left: dates.len(),
                right: closes.len(),
            });
        }
        Self::new(
            dates
                .iter()
                .zip(closes)
                .map(|(d, c)| PricePoint::close_only(*d, *c))
                .collect(),
        )
    }

    /// Rebuilds closes from daily percentage changes, starting at `base`.
    pub fn from_pct_changes(dates: &[NaiveDate], pct: &[f64], base: f64) -> Result<Self> {
        let mut level = base;
        let closes: Vec<f64> = pct
            .iter()
            .map(|p| {
                level *= 1.0 + p / 100.0;
                level
            })
            .collect();
        Self::from_closes(dates, &closes)
    }

    pub fn points(&self) -> &[PricePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.points.iter().map(|p| p.date).collect()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.close).collect()
    }

    /// Simple close-to-close returns; element `t` is the return into day `t`,
    /// with 0 for the first day.
    pub fn returns(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        out.push(0.0);
        out.extend(
            self.points
                .windows(2)
                .map(|w| w[1].close / w[0].close - 1.0),
        );
        out
    }

    pub fn to_csv(&self) -> String {
        let with_ohl = self.points.iter().any(|p| p.open.is_some());
        let mut out = String::from(if with_ohl {
            "date,close,open,high,low\n"
        } else {
            "date,close\n"
        });
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.points {
            if with_ohl {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.date,
                    p.close,
                    opt(p.open),
                    opt(p.high),
                    opt(p.low)
                ));
            } else {
                out.push_str(&format!("{},{}\n", p.date, p.close));
            }
        }
        out
    }
}

#[derive(Debug, Deserialize)]
struct PriceRow {
    date: String,
    close: String,
    #[serde(default)]
    open: Option<String>,
    #[serde(default)]
    high: Option<String>,
    #[serde(default)]
    low: Option<String>,
}

fn number(field: &str, raw: &str, line: u64) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(format!("price line {line}"), format!("bad {field} {raw:?}")))
}

fn optional(field: &str, raw: Option<&String>, line: u64) -> Result<Option<f64>> {
    match raw.map(|s| s.trim()) {
        None | Some("") => Ok(None),
        Some(s) => number(field, s, line).map(Some),
    }
}

pub fn parse_price_csv(reader: impl Read) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse("price header", e.to_string()))?
        .clone();
    for required in ["date", "close"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::MissingField(required.into()));
        }
    }
    let mut points = Vec::new();
    for (i, row) in rdr.deserialize::<PriceRow>().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| Error::parse(format!("price line {line}"), e.to_string()))?;
        let date = NaiveDate::parse_from_str(row.date.trim(), "%Y-%m-%d").map_err(|_| {
            Error::parse(
                format!("price line {line}"),
                format!("bad date {:?}", row.date),
            )
        })?;
        points.push(PricePoint {
            date,
            close: number("close", &row.close, line)?,
            open: optional("open", row.open.as_ref(), line)?,
            high: optional("high", row.high.as_ref(), line)?,
            low: optional("low", row.low.as_ref(), line)?,
        });
    }
    PriceSeries::new(points)
}

pub fn load_price_series(path: &Path) -> Result<PriceSeries> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_price_csv(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_rows() {
        let s = parse_price_csv(
            "date,close\n2015-06-01,100\n2015-06-02,101.5\n2015-06-03,99\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.closes(), vec![100.0, 101.5, 99.0]);
    }

    #[test]
    fn optional_columns() {
        let s = parse_price_csv(
            "date,close,open,high,low\n2015-06-01,100,99,101,98\n2015-06-02,101,,,\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(s.points()[0].high, Some(101.0));
        assert_eq!(s.points()[1].open, None);
        let again = parse_price_csv(s.to_csv().as_bytes()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn duplicate_date_rejected() {
        let err =
            parse_price_csv("date,close\n2015-06-01,100\n2015-06-01,101\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateDate(_)));
    }

    #[test]
    fn zero_close_rejected() {
        let err = parse_price_csv("date,close\n2015-06-01,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { value, .. } if value == 0.0));
        let err = parse_price_csv("date,close,low\n2015-06-01,5,-1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { .. }));
    }

    #[test]
    fn bad_rows_rejected() {
        assert!(parse_price_csv("date,close\n06/01/2015,100\n".as_bytes()).is_err());
        assert!(parse_price_csv("date,close\n2015-06-01,abc\n".as_bytes()).is_err());
        assert!(matches!(
            parse_price_csv("day,close\n2015-06-01,1\n".as_bytes()),
            Err(Error::MissingField(_))
        ));
        assert!(matches!(
            parse_price_csv("date,close\n".as_bytes()),
            Err(Error::NoInput(_))
        ));
    }

    #[test]
    fn pct_changes_rebuild_levels() {
        let d0 = NaiveDate::from_ymd_opt(2015, 6, 1).unwrap();
        let dates: Vec<NaiveDate> = (0..3).map(|i| d0 + chrono::Days::new(i)).collect();
        let s = PriceSeries::from_pct_changes(&dates, &[0.0, 10.0, -50.0], 100.0).unwrap();
        let c = s.closes();
        assert!((c[1] - 110.0).abs() < 1e-9 && (c[2] - 55.0).abs() < 1e-9);
        let r = s.returns();
        assert_eq!(r[0], 0.0);
        assert!((r[1] - 0.1).abs() < 1e-12 && (r[2] + 0.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn output_sorted_whatever_the_input_order(
            offsets in proptest::collection::hash_set(0u64..2000, 1..40),
        ) {
            let d0 = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
            let mut text = String::from("date,close\n");
            for (i, o) in offsets.iter().enumerate() {
                text.push_str(&format!("{},{}\n", d0 + chrono::Days::new(*o), 10.0 + i as f64));
            }
            let s = parse_price_csv(text.as_bytes()).unwrap();
            prop_assert_eq!(s.len(), offsets.len());
            prop_assert!(s.points().windows(2).all(|w| w[0].date < w[1].date));
        }
    }
}
