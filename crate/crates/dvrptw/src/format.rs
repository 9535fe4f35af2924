//! Text formats: Solomon instances (static and with a trailing AVAILABLE TIME
//! column), available-time sidecars, solutions and event logs.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use dvrptw_core::planner::PlannerEvent;
use dvrptw_core::{Customer, ProblemInstance, Solution, Tour, DEPOT};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Instance(#[from] dvrptw_core::Error),
    #[error("cannot read {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Seven columns per customer row.
    Static,
    /// Seven columns plus AVAILABLE TIME.
    Extended,
}

impl Layout {
    fn columns(self) -> usize {
        match self {
            Layout::Static => 7,
            Layout::Extended => 8,
        }
    }
}

fn numbers(line: &str) -> Option<Vec<f64>> {
    line.split_whitespace().map(|t| t.parse::<f64>().ok()).collect()
}

fn starts_numeric(line: &str) -> bool {
    line.split_whitespace()
        .next()
        .is_some_and(|t| t.parse::<f64>().is_ok())
}

/// Parses a Solomon-style instance. With `layout == None` the column count of
/// the first customer row decides.
pub fn parse_instance(text: &str, layout: Option<Layout>) -> Result<ProblemInstance, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, name) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let name = name.to_string();

    let mut fleet: Option<(usize, f64)> = None;
    let mut layout = layout;
    let mut customers = Vec::new();
    let mut seen_table = false;
    let mut last_line = 1;
    for (no, line) in lines {
        last_line = no;
        if line.is_empty() {
            continue;
        }
        if !starts_numeric(line) {
            let upper = line.to_ascii_uppercase();
            if upper.starts_with("CUSTOMER") {
                if fleet.is_none() {
                    return Err(parse_err(no, "customer table before vehicle section"));
                }
                seen_table = true;
            }
            continue;
        }
        let values = numbers(line).ok_or_else(|| parse_err(no, format!("non-numeric field in `{line}`")))?;
        if !seen_table {
            if fleet.is_some() {
                return Err(parse_err(no, "unexpected numeric line before the customer table"));
            }
            if values.len() != 2 {
                return Err(parse_err(no, "vehicle line needs NUMBER and CAPACITY"));
            }
            if values[0] < 0.0 || values[0].fract() != 0.0 {
                return Err(parse_err(no, "vehicle number must be a non-negative integer"));
            }
            fleet = Some((values[0] as usize, values[1]));
            continue;
        }
        let layout = *layout.get_or_insert(match values.len() {
            7 => Layout::Static,
            8 => Layout::Extended,
            n => return Err(parse_err(no, format!("expected 7 or 8 columns, found {n}"))),
        });
        if values.len() != layout.columns() {
            return Err(parse_err(
                no,
                format!("expected {} columns, found {}", layout.columns(), values.len()),
            ));
        }
        let id = values[0];
        if id < 0.0 || id.fract() != 0.0 {
            return Err(parse_err(no, "customer number must be a non-negative integer"));
        }
        let id = id as usize;
        if id != customers.len() {
            return Err(parse_err(no, format!("customer {id} out of order, expected {}", customers.len())));
        }
        let (ready, due) = (values[4], values[5]);
        if ready > due {
            return Err(parse_err(no, format!("ready time {ready} after due date {due}")));
        }
        if values[3] < 0.0 || values[6] < 0.0 {
            return Err(parse_err(no, "negative demand or service time"));
        }
        let mut c = Customer::new(id, (values[1], values[2]), values[3], (ready, due), values[6]);
        if layout == Layout::Extended {
            if values[7] < 0.0 {
                return Err(parse_err(no, "negative available time"));
            }
            c = c.with_available_time(values[7]);
        }
        customers.push(c);
    }
    let (vehicles, capacity) = fleet.ok_or_else(|| parse_err(last_line, "missing vehicle section"))?;
    if customers.is_empty() {
        return Err(parse_err(last_line, "missing depot row"));
    }
    Ok(ProblemInstance::new(name, capacity, vehicles, customers)?)
}

/// `(id, available_time)` pairs, one per line; `#` starts a comment.
pub fn parse_sidecar(text: &str) -> Result<Vec<(usize, f64)>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        let [id, t] = fields.as_slice() else {
            return Err(parse_err(i + 1, "expected `id available_time`"));
        };
        let id = id.parse::<usize>().map_err(|_| parse_err(i + 1, format!("bad customer id `{id}`")))?;
        let t = t.parse::<f64>().map_err(|_| parse_err(i + 1, format!("bad available time `{t}`")))?;
        out.push((id, t));
    }
    Ok(out)
}

/// Writes an unscaled instance; `Layout::Static` drops available times.
pub fn write_instance(inst: &ProblemInstance, layout: Layout) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}\n\nVEHICLE\nNUMBER     CAPACITY", inst.name());
    let _ = writeln!(s, "{:>6} {:>12}\n\nCUSTOMER", inst.max_vehicles(), inst.capacity());
    s.push_str("CUST NO.  XCOORD.  YCOORD.  DEMAND  READY TIME  DUE DATE  SERVICE TIME");
    if layout == Layout::Extended {
        s.push_str("  AVAILABLE TIME");
    }
    s.push_str("\n\n");
    for c in inst.customers() {
        let _ = write!(
            s,
            "{:>5} {:>10} {:>10} {:>8} {:>10} {:>10} {:>10}",
            c.id, c.x, c.y, c.demand, c.ready_time, c.due_date, c.service_time
        );
        if layout == Layout::Extended {
            let _ = write!(s, " {:>10}", c.available_time);
        }
        s.push('\n');
    }
    s
}

/// Instance label and declared dynamicity from a file name such as
/// `C101-0.5.txt`.
pub fn label_from_path(path: &Path) -> (String, Option<f64>) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if let Some((base, level)) = stem.rsplit_once('-') {
        if let Ok(d) = level.parse::<f64>() {
            if (0.0..=1.0).contains(&d) {
                return (base.to_string(), Some(d));
            }
        }
    }
    (stem, None)
}

/// An unscaled instance with its report label.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: ProblemInstance,
    pub label: String,
    /// Declared level if the file name carries one, else the observed share
    /// of dynamic customers.
    pub dynamicity: f64,
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_instance(path: &Path, sidecar: Option<&Path>) -> Result<LoadedInstance, FormatError> {
    let mut instance = parse_instance(&read(path)?, None)?;
    if let Some(side) = sidecar {
        let pairs = parse_sidecar(&read(side)?)?;
        instance = instance.with_available_times(&pairs)?;
    }
    let (base, declared) = label_from_path(path);
    let profile = instance.dynamicity();
    let dynamicity = declared.unwrap_or(profile.level);
    let label = format!("{base}-{dynamicity:.1}");
    Ok(LoadedInstance {
        instance,
        label,
        dynamicity,
    })
}

/// Header `NV <n> TD <unscaled distance>`, then one line per tour with `|`
/// after the committed prefix when there is one.
pub fn write_solution(sol: &Solution, inst: &ProblemInstance) -> String {
    let mut s = format!(
        "NV {} TD {:.3}\n",
        sol.n_vehicles(),
        inst.unscale_length(sol.total_distance())
    );
    for tour in sol.tours().iter().filter(|t| !t.is_empty()) {
        let mut parts: Vec<String> = Vec::with_capacity(tour.len() + 1);
        for (pos, c) in tour.visits().iter().enumerate() {
            if pos == tour.committed_len() && pos > 0 {
                parts.push("|".into());
            }
            parts.push(c.to_string());
        }
        if tour.committed_len() == tour.len() {
            parts.push("|".into());
        }
        s.push_str(&parts.join(" "));
        s.push('\n');
    }
    s
}

/// Reads tours written by [`write_solution`] (or bare lists of customer ids,
/// optionally prefixed by `Route N:`). The header line is ignored.
pub fn parse_solution(text: &str, inst: &ProblemInstance) -> Result<Solution, FormatError> {
    let mut routes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut line = raw.trim();
        if line.is_empty() || line.starts_with("NV") {
            continue;
        }
        if let Some((_, rest)) = line.split_once(':') {
            line = rest.trim();
        }
        let mut visits = Vec::new();
        let mut committed = 0;
        for tok in line.split_whitespace() {
            if tok == "|" {
                committed = visits.len();
                continue;
            }
            let c = tok
                .parse::<usize>()
                .map_err(|_| parse_err(i + 1, format!("bad customer id `{tok}`")))?;
            if c == DEPOT || c >= inst.n_nodes() {
                return Err(parse_err(i + 1, format!("customer {c} is not a customer of the instance")));
            }
            visits.push(c);
        }
        routes.push((visits, committed));
    }
    Ok(Solution::from_visits(&routes, inst)?)
}

#[derive(Debug, Serialize, PartialEq)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventRecord {
    DayStarted { available: usize, nv: usize, td: f64 },
    Revealed { slice: usize, time: f64, customers: Vec<usize> },
    Committed { slice: usize, time: f64, tour: usize, position: usize, customer: usize },
    Restarted { slice: usize, time: f64, n_available: usize, tau0: f64 },
    Improved { slice: usize, nv: usize, td: f64 },
    HardInfeasible { slice: usize, time: f64, customer: usize },
    DayEnded { nv: usize, td: f64 },
}

impl EventRecord {
    /// Times stay in working-day units; distances are unscaled.
    pub fn new(e: &PlannerEvent, inst: &ProblemInstance) -> Self {
        let td = |d: f64| inst.unscale_length(d);
        match e.clone() {
            PlannerEvent::DayStarted { available, nv, td: d } => Self::DayStarted { available, nv, td: td(d) },
            PlannerEvent::Revealed { slice, time, customers } => Self::Revealed { slice, time, customers },
            PlannerEvent::Committed {
                slice,
                time,
                tour,
                position,
                customer,
            } => Self::Committed {
                slice,
                time,
                tour,
                position,
                customer,
            },
            PlannerEvent::Restarted {
                slice,
                time,
                n_available,
                tau0,
            } => Self::Restarted {
                slice,
                time,
                n_available,
                tau0,
            },
            PlannerEvent::Improved { slice, nv, td: d } => Self::Improved { slice, nv, td: td(d) },
            PlannerEvent::HardInfeasible { slice, time, customer } => Self::HardInfeasible { slice, time, customer },
            PlannerEvent::DayEnded { nv, td: d } => Self::DayEnded { nv, td: td(d) },
        }
    }
}

pub fn write_event_log<W: Write>(events: &[PlannerEvent], inst: &ProblemInstance, mut out: W) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, &EventRecord::new(e, inst))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Unscaled length of a single tour, for checks against published routes.
pub fn tour_length(tour: &Tour, inst: &ProblemInstance) -> f64 {
    inst.unscale_length(tour.length())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "C1X

VEHICLE
NUMBER     CAPACITY
  25         200

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME

    0      40         50          0          0       1236          0
    1      45         68         10        912        967         90
    2      45         70         30        825        870         90
    3      42         66         10         65        146         90
";

    #[test]
    fn parses_static_layout() {
        let inst = parse_instance(SMALL, None).unwrap();
        assert_eq!(inst.name(), "C1X");
        assert_eq!(inst.n_nodes(), 4);
        assert_eq!(inst.capacity(), 200.0);
        assert_eq!(inst.max_vehicles(), 25);
        assert_eq!(inst.horizon(), (0.0, 1236.0));
        assert_eq!(inst.customer(2).demand, 30.0);
        assert!(inst.customers().iter().all(|c| c.available_time == 0.0));
    }

    #[test]
    fn depot_only_is_valid() {
        let text = "D\nVEHICLE\nNUMBER CAPACITY\n1 10\nCUSTOMER\n0 0 0 0 0 100 0\n";
        let inst = parse_instance(text, None).unwrap();
        assert_eq!(inst.n_customers(), 0);
    }

    #[test]
    fn extended_column_passes_through() {
        let mut text = String::from("E\nVEHICLE\nNUMBER CAPACITY\n3 100\nCUSTOMER\n0 0 0 0 0 500 0 0\n");
        for id in 1..=5 {
            let a = if id == 5 { 37 } else { 0 };
            text.push_str(&format!("{id} {id} 1 1 0 400 5 {a}\n"));
        }
        let inst = parse_instance(&text, None).unwrap();
        assert_eq!(inst.customer(5).available_time, 37.0);
        assert_eq!(inst.dynamicity().dynamic_ids, vec![5]);
        assert!(parse_instance(&text, Some(Layout::Static)).is_err());
    }

    #[test]
    fn errors_name_the_line() {
        let bad = SMALL.replace("   42         66", "   42         6x");
        match parse_instance(&bad, None) {
            Err(FormatError::Parse { line, .. }) => assert_eq!(line, 13),
            other => panic!("{other:?}"),
        }
        let inverted = SMALL.replace("65        146", "165        146");
        assert!(matches!(parse_instance(&inverted, None), Err(FormatError::Parse { line: 13, .. })));
        let short = SMALL.replace("   42         66         10", "   42         66");
        assert!(matches!(parse_instance(&short, None), Err(FormatError::Parse { line: 13, .. })));
        assert!(parse_instance("X\nVEHICLE\n", None).is_err());
        assert!(parse_instance("X\nVEHICLE\nNUMBER CAPACITY\n1 1\nCUSTOMER\n", None).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let inst = parse_instance(SMALL, None).unwrap();
        let again = parse_instance(&write_instance(&inst, Layout::Static), None).unwrap();
        assert_eq!(again, inst);
        let dynamic = inst.with_available_times(&[(1, 12.5), (3, 0.25)]).unwrap();
        let again = parse_instance(&write_instance(&dynamic, Layout::Extended), None).unwrap();
        assert_eq!(again, dynamic);
    }

    #[test]
    fn sidecar_and_labels() {
        let pairs = parse_sidecar("# id time\n1 12\n3, 7.5\n\n").unwrap();
        assert_eq!(pairs, vec![(1, 12.0), (3, 7.5)]);
        assert!(matches!(parse_sidecar("1 2 3"), Err(FormatError::Parse { line: 1, .. })));
        assert_eq!(label_from_path(Path::new("data/C101-0.5.txt")), ("C101".into(), Some(0.5)));
        assert_eq!(label_from_path(Path::new("r201.txt")), ("r201".into(), None));
    }

    #[test]
    fn solution_text_round_trip() {
        let inst = parse_instance(SMALL, None).unwrap();
        let sol = Solution::from_visits(&[(vec![3, 2], 1), (vec![1], 1), (vec![], 0)], &inst).unwrap();
        let text = write_solution(&sol, &inst);
        assert!(text.starts_with("NV 2 TD "));
        assert!(text.contains("\n3 | 2\n"));
        assert!(text.contains("\n1 |\n"));
        let back = parse_solution(&text, &inst).unwrap();
        let mut expected = sol.clone();
        expected.remove_empty_tours();
        assert_eq!(back, expected);
        assert!(parse_solution("Route 1: 1 9", &inst).is_err());
    }

    #[test]
    fn event_log_is_json_lines() {
        let inst = parse_instance(SMALL, None).unwrap();
        let events = vec![
            PlannerEvent::Revealed {
                slice: 2,
                time: 4.0,
                customers: vec![1, 3],
            },
            PlannerEvent::DayEnded { nv: 1, td: 10.0 },
        ];
        let mut buf = Vec::new();
        write_event_log(&events, &inst, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], r#"{"event":"revealed","slice":2,"time":4.0,"customers":[1,3]}"#);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["event"], "day_ended");
    }
}
