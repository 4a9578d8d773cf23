use std::collections::HashMap;
use std::fs;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim, WriterBuilder};
use tracing::warn;

use crate::profile::{ProfileKind, ProfilePoint, ShearProfile};

use super::{ConditionSet, DatasetError, HydraulicCondition, SectionClass, DEFAULT_DIAMETER_M};

const CONDITION_HEADER: [&str; 7] = [
    "sample_id",
    "section_class",
    "t_over_D",
    "h_plus_t_over_D",
    "S0",
    "Fr",
    "Q_lps",
];
const TAU_MAX_COLUMN: &str = "tau_max_Pa";
const PROFILE_HEADER: [&str; 3] = ["sample_id", "y_over_P", "tau_Pa"];
const DIAMETER_DIRECTIVE: &str = "#D_m=";

fn read_file(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn csv_error(e: csv::Error) -> DatasetError {
    let line = e.position().map_or(0, |p| p.line());
    DatasetError::Csv {
        line,
        message: e.to_string(),
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(found: &StringRecord, expected: &[&str]) -> Result<(), DatasetError> {
    if found.iter().ne(expected.iter().copied()) {
        return Err(DatasetError::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn field<'a>(rec: &'a StringRecord, i: usize, column: &str) -> Result<&'a str, DatasetError> {
    rec.get(i).ok_or_else(|| DatasetError::Field {
        line: line_of(rec),
        column: column.into(),
        message: "missing value".into(),
    })
}

fn line_of(rec: &StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn number(rec: &StringRecord, i: usize, column: &str) -> Result<f64, DatasetError> {
    let raw = field(rec, i, column)?;
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(DatasetError::Field {
            line: line_of(rec),
            column: column.into(),
            message: format!("'{raw}' is not a finite number"),
        }),
    }
}

fn diameter_directive(text: &str) -> Result<f64, DatasetError> {
    let mut diameter = DEFAULT_DIAMETER_M;
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix(DIAMETER_DIRECTIVE) else {
            continue;
        };
        diameter = match rest.trim().parse::<f64>() {
            Ok(d) if d.is_finite() && d > 0.0 => d,
            _ => return Err(DatasetError::Directive(format!("'{}' is not a positive length", rest.trim()))),
        };
    }
    Ok(diameter)
}

/// Parses a conditions table. A `#D_m=` comment line overrides the default
/// diameter.
pub fn read_conditions(text: &str) -> Result<ConditionSet, DatasetError> {
    let diameter = diameter_directive(text)?;
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let with_tau = header.len() == CONDITION_HEADER.len() + 1;
    if with_tau {
        let mut expected = CONDITION_HEADER.to_vec();
        expected.push(TAU_MAX_COLUMN);
        check_header(&header, &expected)?;
    } else {
        check_header(&header, &CONDITION_HEADER)?;
    }

    let mut conditions: Vec<HydraulicCondition> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let class_raw = field(&rec, 1, CONDITION_HEADER[1])?;
        let section_class = class_raw.parse::<SectionClass>().map_err(|message| DatasetError::Field {
            line: line_of(&rec),
            column: CONDITION_HEADER[1].into(),
            message,
        })?;
        let tau_max_override = match rec.get(7) {
            Some(s) if with_tau && !s.is_empty() => Some(number(&rec, 7, TAU_MAX_COLUMN)?),
            _ => None,
        };
        let c = HydraulicCondition {
            sample_id: field(&rec, 0, CONDITION_HEADER[0])?.to_string(),
            section_class,
            t_over_d: number(&rec, 2, CONDITION_HEADER[2])?,
            h_plus_t_over_d: number(&rec, 3, CONDITION_HEADER[3])?,
            slope: number(&rec, 4, CONDITION_HEADER[4])?,
            froude: number(&rec, 5, CONDITION_HEADER[5])?,
            discharge_lps: number(&rec, 6, CONDITION_HEADER[6])?,
            tau_max_override,
        };
        c.validate()?;
        if conditions.iter().any(|o| o.sample_id == c.sample_id) {
            return Err(DatasetError::Invalid {
                sample_id: c.sample_id,
                reason: "duplicate sample id".into(),
            });
        }
        conditions.push(c);
    }
    Ok(ConditionSet {
        diameter,
        conditions,
    })
}

pub fn load_conditions(path: &Path) -> Result<ConditionSet, DatasetError> {
    read_conditions(&read_file(path)?)
}

/// Parses measured profiles, one group of rows per sample, in order of first
/// appearance. Positions must increase strictly within a sample.
pub fn read_profiles(text: &str) -> Result<Vec<ShearProfile>, DatasetError> {
    if text.trim().is_empty() {
        warn!("profiles file is empty");
        return Ok(Vec::new());
    }
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?.clone();
    check_header(&header, &PROFILE_HEADER)?;

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<ProfilePoint>> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let id = field(&rec, 0, PROFILE_HEADER[0])?.to_string();
        let point = ProfilePoint {
            y_over_p: number(&rec, 1, PROFILE_HEADER[1])?,
            tau: number(&rec, 2, PROFILE_HEADER[2])?,
        };
        groups
            .entry(id.clone())
            .or_insert_with(|| {
                order.push(id.clone());
                Vec::new()
            })
            .push(point);
    }
    if order.is_empty() {
        warn!("profiles file has no data rows");
    }
    order
        .into_iter()
        .map(|id| {
            let points = groups.remove(&id).unwrap_or_default();
            ShearProfile::new(id.clone(), ProfileKind::Measured, points).map_err(|e| DatasetError::Invalid {
                sample_id: id,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn load_profiles(path: &Path) -> Result<Vec<ShearProfile>, DatasetError> {
    read_profiles(&read_file(path)?)
}

fn csv_write_error(e: csv::Error) -> DatasetError {
    DatasetError::Csv {
        line: 0,
        message: e.to_string(),
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, DatasetError> {
    let bytes = w.into_inner().map_err(|e| DatasetError::Csv {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_conditions(set: &ConditionSet) -> Result<String, DatasetError> {
    let with_tau = set.conditions.iter().any(|c| c.tau_max_override.is_some());
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    let mut header = CONDITION_HEADER.to_vec();
    if with_tau {
        header.push(TAU_MAX_COLUMN);
    }
    w.write_record(&header).map_err(csv_write_error)?;
    for c in &set.conditions {
        let mut row = vec![
            c.sample_id.clone(),
            c.section_class.to_string(),
            c.t_over_d.to_string(),
            c.h_plus_t_over_d.to_string(),
            c.slope.to_string(),
            c.froude.to_string(),
            c.discharge_lps.to_string(),
        ];
        if with_tau {
            row.push(c.tau_max_override.map(|t| t.to_string()).unwrap_or_default());
        }
        w.write_record(&row).map_err(csv_write_error)?;
    }
    Ok(format!("{DIAMETER_DIRECTIVE}{}\n{}", set.diameter, finish(w)?))
}

pub fn write_profiles(profiles: &[ShearProfile]) -> Result<String, DatasetError> {
    let mut w = WriterBuilder::new().from_writer(Vec::new());
    w.write_record(PROFILE_HEADER).map_err(csv_write_error)?;
    for p in profiles {
        for pt in &p.points {
            w.write_record([p.sample_id.clone(), pt.y_over_p.to_string(), pt.tau.to_string()])
                .map_err(csv_write_error)?;
        }
    }
    finish(w)
}
