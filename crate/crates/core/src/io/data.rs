//! The measurement CSV: header `time_s,current_a,voltage_v,temperature_c`,
//! one sample per row, current positive on discharge.

use std::io::{Read, Write};
use std::path::Path;

use crate::domain::TimeSeries;
use crate::error::{Error, Result};

pub const DATA_COLUMNS: [&str; 4] = ["time_s", "current_a", "voltage_v", "temperature_c"];

/// Parses and validates a data CSV. Rows are numbered from 1 after the
/// header in error messages.
pub fn read_series(r: impl Read) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != DATA_COLUMNS {
        return Err(Error::InvalidInput(format!(
            "header must be `{}`, found `{}`",
            DATA_COLUMNS.join(","),
            header.join(",")
        )));
    }
    let mut cols: [Vec<f64>; 4] = Default::default();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| Error::InvalidInput(format!("row {row}: {e}")))?;
        if rec.len() != 4 {
            return Err(Error::InvalidInput(format!("row {row}: expected 4 fields, found {}", rec.len())));
        }
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::InvalidInput(format!("row {row}: `{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("row {row}: non-finite {}", DATA_COLUMNS[c])));
            }
            cols[c].push(v);
        }
        if row > 1 && cols[0][row - 1] <= cols[0][row - 2] {
            return Err(Error::InvalidInput(format!("non-monotone time at row {row}")));
        }
    }
    if cols[0].is_empty() {
        return Err(Error::InvalidInput("no data rows".into()));
    }
    let [t, i, v, temp] = cols;
    TimeSeries::new(t, i, v, temp)
}

pub fn load_series(path: &Path) -> Result<TimeSeries> {
    read_series(std::fs::File::open(path)?)
}

pub fn write_series(series: &TimeSeries, w: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(DATA_COLUMNS)?;
    for k in 0..series.len() {
        w.write_record([
            series.time_s[k].to_string(),
            series.current_a[k].to_string(),
            series.voltage_v[k].to_string(),
            series.temperature_c[k].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_series(series: &TimeSeries, path: &Path) -> Result<()> {
    write_series(series, std::io::BufWriter::new(std::fs::File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_exactly() {
        let s = TimeSeries::new(
            vec![0.0, 1.0, 2.5],
            vec![166.0, -0.1, 0.0],
            vec![3.3, 3.2999999999999998, 1.0 / 3.0],
            vec![25.0, 25.0, 24.9],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_series(&s, &mut buf).unwrap();
        assert_eq!(read_series(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn repeated_timestamp_names_the_row() {
        let csv = "time_s,current_a,voltage_v,temperature_c\n0,1,3.3,25\n1,1,3.3,25\n1,1,3.3,25\n";
        let e = read_series(csv.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("non-monotone time at row 3"), "{e}");
    }

    #[test]
    fn rejects_bad_header_and_values() {
        assert!(read_series("t,i,v,T\n0,1,3,25\n".as_bytes()).is_err());
        let e = read_series("time_s,current_a,voltage_v,temperature_c\n0,1,NaN,25\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("row 1"));
        let e = read_series("time_s,current_a,voltage_v,temperature_c\n0,1,x,25\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("not a number"));
    }
}
