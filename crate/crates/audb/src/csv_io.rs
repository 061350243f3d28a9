//! CSV encoding of AU relations.
//!
//! Every attribute `A` is stored as three columns `A__lb, A__sg, A__ub`; a
//! plain column `A` denotes a certain attribute and is promoted to
//! `⟨v, v, v⟩` on ingestion. The reserved columns `_m__lb, _m__sg, _m__ub`
//! carry the multiplicity triple; when absent every row gets `(1, 1, 1)`.
//! Attribute kinds are inferred per column: real if every value parses as a
//! decimal number, boolean if every value is `true`/`false`, text otherwise.

use std::path::Path;

use crate::relation::{AuRelation, RangeTuple, Schema};
use crate::value::{Kind, MultTriple, RangeValue, Scalar};
use crate::{Error, Result};

const MULT_PREFIX: &str = "_m";
const SUFFIXES: [&str; 3] = ["__lb", "__sg", "__ub"];

enum ColumnSpec {
    // Indices of the lb/sg/ub columns.
    Triple(String, [usize; 3]),
    Certain(String, usize),
}

fn split_suffix(header: &str) -> Option<(&str, usize)> {
    for (k, suffix) in SUFFIXES.iter().enumerate() {
        if let Some(base) = header.strip_suffix(suffix) {
            return Some((base, k));
        }
    }
    None
}

fn parse_header(headers: &[String]) -> Result<(Vec<ColumnSpec>, Option<[usize; 3]>)> {
    let mut specs: Vec<ColumnSpec> = Vec::new();
    let mut mult: Option<[Option<usize>; 3]> = None;
    let mut open: Vec<(String, [Option<usize>; 3])> = Vec::new();

    for (idx, h) in headers.iter().enumerate() {
        if let Some((base, k)) = split_suffix(h) {
            if base == MULT_PREFIX {
                let slots = mult.get_or_insert([None; 3]);
                if slots[k].replace(idx).is_some() {
                    return Err(Error::Csv {
                        detail: format!("duplicate column `{h}`"),
                    });
                }
                continue;
            }
            match open.iter_mut().find(|(b, _)| b == base) {
                Some((_, slots)) => {
                    if slots[k].replace(idx).is_some() {
                        return Err(Error::Csv {
                            detail: format!("duplicate column `{h}`"),
                        });
                    }
                }
                None => {
                    let mut slots = [None; 3];
                    slots[k] = Some(idx);
                    open.push((base.to_owned(), slots));
                }
            }
        } else {
            specs.push(ColumnSpec::Certain(h.clone(), idx));
        }
    }
    for (base, slots) in open {
        match (slots[0], slots[1], slots[2]) {
            (Some(a), Some(b), Some(c)) => specs.push(ColumnSpec::Triple(base, [a, b, c])),
            _ => {
                return Err(Error::Csv {
                    detail: format!("attribute `{base}` is missing one of __lb/__sg/__ub"),
                })
            }
        }
    }
    let mult = match mult {
        None => None,
        Some([Some(a), Some(b), Some(c)]) => Some([a, b, c]),
        Some(_) => {
            return Err(Error::Csv {
                detail: "multiplicity columns require all of _m__lb/_m__sg/_m__ub".into(),
            })
        }
    };
    Ok((specs, mult))
}

fn infer_kind(values: &[&str]) -> Kind {
    if values.iter().all(|v| v.parse::<f64>().is_ok()) {
        Kind::Real
    } else if values.iter().all(|v| *v == "true" || *v == "false") {
        Kind::Bool
    } else {
        Kind::Text
    }
}

fn parse_scalar(value: &str, kind: Kind) -> Result<Scalar> {
    match kind {
        Kind::Real => value
            .parse::<f64>()
            .map(Scalar::Real)
            .map_err(|_| Error::Csv {
                detail: format!("`{value}` is not a number"),
            }),
        Kind::Bool => match value {
            "true" => Ok(Scalar::Bool(true)),
            "false" => Ok(Scalar::Bool(false)),
            _ => Err(Error::Csv {
                detail: format!("`{value}` is not a boolean"),
            }),
        },
        Kind::Text => Ok(Scalar::Text(value.to_owned())),
    }
}

fn parse_natural(value: &str) -> Result<u64> {
    value.parse::<u64>().map_err(|_| Error::Csv {
        detail: format!("`{value}` is not a natural number"),
    })
}

/// Read an AU relation from a CSV file.
pub fn read_csv(path: impl AsRef<Path>) -> Result<AuRelation> {
    let mut reader = csv::Reader::from_path(path.as_ref()).map_err(|e| Error::Csv {
        detail: e.to_string(),
    })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv {
            detail: e.to_string(),
        })?
        .iter()
        .map(str::to_owned)
        .collect();
    let (specs, mult_cols) = parse_header(&headers)?;
    if specs.is_empty() {
        return Err(Error::Csv {
            detail: "no attribute columns in header".into(),
        });
    }

    let mut records: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        records.push(record.map_err(|e| Error::Csv {
            detail: e.to_string(),
        })?);
    }

    // Infer a kind per attribute from all its cells across all rows.
    let mut kinds = Vec::with_capacity(specs.len());
    for spec in &specs {
        let mut cells = Vec::new();
        for record in &records {
            match spec {
                ColumnSpec::Triple(_, idxs) => {
                    for &i in idxs {
                        cells.push(record.get(i).unwrap_or(""));
                    }
                }
                ColumnSpec::Certain(_, i) => cells.push(record.get(*i).unwrap_or("")),
            }
        }
        kinds.push(infer_kind(&cells));
    }

    let schema = Schema::new(
        specs
            .iter()
            .zip(&kinds)
            .map(|(spec, &kind)| {
                let name = match spec {
                    ColumnSpec::Triple(n, _) | ColumnSpec::Certain(n, _) => n.clone(),
                };
                (name, kind)
            })
            .collect(),
    )?;

    let mut relation = AuRelation::new(schema);
    for record in &records {
        let mut values = Vec::with_capacity(specs.len());
        for (spec, &kind) in specs.iter().zip(&kinds) {
            let value = match spec {
                ColumnSpec::Triple(_, [a, b, c]) => RangeValue::new(
                    parse_scalar(record.get(*a).unwrap_or(""), kind)?,
                    parse_scalar(record.get(*b).unwrap_or(""), kind)?,
                    parse_scalar(record.get(*c).unwrap_or(""), kind)?,
                )?,
                ColumnSpec::Certain(_, i) => {
                    RangeValue::certain(parse_scalar(record.get(*i).unwrap_or(""), kind)?)
                }
            };
            values.push(value);
        }
        let ann = match mult_cols {
            Some([a, b, c]) => MultTriple::new(
                parse_natural(record.get(a).unwrap_or(""))?,
                parse_natural(record.get(b).unwrap_or(""))?,
                parse_natural(record.get(c).unwrap_or(""))?,
            )?,
            None => MultTriple::ONE,
        };
        relation.insert(RangeTuple(values), ann)?;
    }
    Ok(relation)
}

fn format_scalar(s: &Scalar) -> String {
    s.to_string()
}

/// Write an AU relation to a CSV file using the triple-column encoding.
pub fn write_csv(relation: &AuRelation, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(|e| Error::Csv {
        detail: e.to_string(),
    })?;
    let mut header = Vec::new();
    for name in relation.schema().names() {
        for suffix in SUFFIXES {
            header.push(format!("{name}{suffix}"));
        }
    }
    for suffix in SUFFIXES {
        header.push(format!("{MULT_PREFIX}{suffix}"));
    }
    writer.write_record(&header).map_err(|e| Error::Csv {
        detail: e.to_string(),
    })?;
    for (tuple, ann) in relation.rows() {
        let mut record = Vec::new();
        for value in tuple.values() {
            record.push(format_scalar(value.lb()));
            record.push(format_scalar(value.sg()));
            record.push(format_scalar(value.ub()));
        }
        record.push(ann.lb().to_string());
        record.push(ann.sg().to_string());
        record.push(ann.ub().to_string());
        writer.write_record(&record).map_err(|e| Error::Csv {
            detail: e.to_string(),
        })?;
    }
    writer.flush().map_err(|e| Error::Csv {
        detail: e.to_string(),
    })?;
    Ok(())
}
