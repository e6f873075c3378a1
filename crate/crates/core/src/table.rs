//! Column-oriented tabular data with role and feature-type metadata.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONTINUOUS: &str = "continuous";
pub const CONFOUND: &str = "confound";
pub const CATEGORICAL: &str = "categorical";
/// Confound columns that a confound remover already regressed out.
pub const REMOVED_CONFOUND: &str = "removed_confound";

const RESERVED_TYPES: [&str; 4] = [CONTINUOUS, CONFOUND, CATEGORICAL, REMOVED_CONFOUND];

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Column::Numeric(_))
    }

    fn take(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => {
                Column::Categorical(rows.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }

    /// Cell rendered as text; numbers use the shortest round-trip form.
    pub fn cell(&self, row: usize) -> String {
        match self {
            Column::Numeric(v) => format_float(v[row]),
            Column::Categorical(v) => v[row].clone(),
        }
    }
}

pub(crate) fn format_float(v: f64) -> String {
    format!("{v}")
}

/// What a column is for. Only `Feature` columns are visible to selectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    Feature,
    Target,
    /// Carried along for grouping or subgroup selection, never fed to a model.
    Auxiliary,
}

/// Immutable table of equally long named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Column>,
    roles: Vec<ColumnRole>,
    n_rows: usize,
    index: HashMap<String, usize>,
}

impl Table {
    /// Builds a table; every column starts with the `Feature` role.
    pub fn new(columns: Vec<(String, Column)>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |(_, c)| c.len());
        let mut index = HashMap::with_capacity(columns.len());
        let mut names = Vec::with_capacity(columns.len());
        let mut cols = Vec::with_capacity(columns.len());
        for (pos, (name, col)) in columns.into_iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptyColumnName(pos));
            }
            if col.len() != n_rows {
                return Err(Error::ColumnLength {
                    column: name,
                    expected: n_rows,
                    found: col.len(),
                });
            }
            if let Column::Numeric(v) = &col {
                if let Some(row) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite {
                        column: name,
                        line: row as u64 + 2,
                        value: format_float(v[row]),
                    });
                }
            }
            if index.insert(name.clone(), pos).is_some() {
                return Err(Error::DuplicateColumn(name));
            }
            names.push(name);
            cols.push(col);
        }
        let roles = vec![ColumnRole::Feature; names.len()];
        Ok(Self {
            names,
            columns: cols,
            roles,
            n_rows,
            index,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn position(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.position(name)?])
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64]> {
        match self.column(name)? {
            Column::Numeric(v) => Ok(v),
            Column::Categorical(_) => Err(Error::NotNumeric(name.to_string())),
        }
    }

    pub fn categorical(&self, name: &str) -> Result<&[String]> {
        match self.column(name)? {
            Column::Categorical(v) => Ok(v),
            Column::Numeric(_) => Err(Error::NotCategorical(name.to_string())),
        }
    }

    /// Column values as text labels, whatever the storage type.
    pub fn labels(&self, name: &str) -> Result<Vec<String>> {
        let col = self.column(name)?;
        Ok((0..self.n_rows).map(|i| col.cell(i)).collect())
    }

    pub fn role(&self, name: &str) -> Result<ColumnRole> {
        Ok(self.roles[self.position(name)?])
    }

    pub fn with_role(mut self, name: &str, role: ColumnRole) -> Result<Self> {
        let pos = self.position(name)?;
        self.roles[pos] = role;
        Ok(self)
    }

    /// Feature columns in table order.
    pub fn feature_names(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.roles)
            .filter(|(_, r)| **r == ColumnRole::Feature)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn is_feature(&self, name: &str) -> bool {
        self.index
            .get(name)
            .is_some_and(|&p| self.roles[p] == ColumnRole::Feature)
    }

    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            roles: self.roles.clone(),
            n_rows: rows.len(),
            index: self.index.clone(),
        }
    }

    /// Keeps the named columns, in the given order, with their roles.
    pub fn select(&self, names: &[&str]) -> Result<Table> {
        let mut parts = Vec::with_capacity(names.len());
        let mut roles = Vec::with_capacity(names.len());
        for name in names {
            let pos = self.position(name)?;
            parts.push((name.to_string(), self.columns[pos].clone()));
            roles.push(self.roles[pos]);
        }
        let mut t = Table::new(parts)?;
        if names.is_empty() {
            t.n_rows = self.n_rows;
        }
        t.roles = roles;
        Ok(t)
    }

    /// Replaces the values of existing columns, keeping position and role.
    pub fn with_replaced(&self, replacements: Vec<(String, Column)>) -> Result<Table> {
        let mut out = self.clone();
        for (name, col) in replacements {
            let pos = out.position(&name)?;
            if col.len() != out.n_rows {
                return Err(Error::ColumnLength {
                    column: name,
                    expected: out.n_rows,
                    found: col.len(),
                });
            }
            out.columns[pos] = col;
        }
        Ok(out)
    }

    /// Drops `remove` and appends `add` as feature columns.
    pub fn with_columns_swapped(&self, remove: &[String], add: Vec<(String, Column)>) -> Result<Table> {
        let drop: BTreeSet<&str> = remove.iter().map(String::as_str).collect();
        let mut parts = Vec::new();
        let mut roles = Vec::new();
        for ((name, col), role) in self.names.iter().zip(&self.columns).zip(&self.roles) {
            if !drop.contains(name.as_str()) {
                parts.push((name.clone(), col.clone()));
                roles.push(*role);
            }
        }
        for (name, col) in add {
            if col.len() != self.n_rows {
                return Err(Error::ColumnLength {
                    column: name,
                    expected: self.n_rows,
                    found: col.len(),
                });
            }
            parts.push((name, col));
            roles.push(ColumnRole::Feature);
        }
        let mut t = Table::new(parts)?;
        t.roles = roles;
        t.n_rows = self.n_rows;
        Ok(t)
    }
}

/// Assignment of feature columns to named types.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureTypeMap {
    assignments: BTreeMap<String, BTreeSet<String>>,
}

impl FeatureTypeMap {
    pub fn new<I, S, C>(assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, C)>,
        S: Into<String>,
        C: IntoIterator,
        C::Item: Into<String>,
    {
        let mut owner: HashMap<String, String> = HashMap::new();
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (ty, cols) in assignments {
            let ty = ty.into();
            if ty.is_empty() {
                return Err(Error::UnknownFeatureType(ty));
            }
            let entry = map.entry(ty.clone()).or_default();
            for col in cols {
                let col = col.into();
                if let Some(prev) = owner.get(&col) {
                    if *prev != ty {
                        return Err(Error::ConflictingType {
                            column: col,
                            first: prev.clone(),
                            second: ty,
                        });
                    }
                }
                owner.insert(col.clone(), ty.clone());
                entry.insert(col);
            }
        }
        Ok(Self { assignments: map })
    }

    /// Checks that every assigned column exists in `table`.
    pub fn validate(&self, table: &Table) -> Result<()> {
        for col in self.assignments.values().flatten() {
            if !table.has_column(col) {
                return Err(Error::UnknownColumn(col.clone()));
            }
        }
        Ok(())
    }

    /// Type of a column; unassigned columns are continuous.
    pub fn type_of(&self, column: &str) -> &str {
        self.assignments
            .iter()
            .find(|(_, cols)| cols.contains(column))
            .map_or(CONTINUOUS, |(t, _)| t.as_str())
    }

    pub fn is_known_type(&self, ty: &str) -> bool {
        RESERVED_TYPES.contains(&ty) || self.assignments.contains_key(ty)
    }

    pub fn columns_of(&self, ty: &str) -> impl Iterator<Item = &str> {
        self.assignments
            .get(ty)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn assignments(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.assignments
    }

    /// Moves `columns` to type `ty`.
    pub fn retagged(&self, columns: &[String], ty: &str) -> Self {
        let mut out = self.without(columns);
        let entry = out.assignments.entry(ty.to_string()).or_default();
        entry.extend(columns.iter().cloned());
        out
    }

    /// Forgets `columns` (they revert to the default type if they remain).
    pub fn without(&self, columns: &[String]) -> Self {
        let mut out = self.clone();
        for cols in out.assignments.values_mut() {
            for c in columns {
                cols.remove(c);
            }
        }
        out
    }
}

/// Which feature columns a step applies to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnSelector {
    /// Columns whose type is any of the listed type names.
    ByType(Vec<String>),
    ByName(Vec<String>),
    /// Every feature column; the `"*"` wildcard parses to this.
    AllFeatures,
}

impl ColumnSelector {
    pub fn by_type(ty: impl Into<String>) -> Self {
        ColumnSelector::ByType(vec![ty.into()])
    }

    /// `"*"` selects all features, anything else is a type name.
    pub fn parse(spec: &str) -> Self {
        match spec {
            "*" | "all_features" => ColumnSelector::AllFeatures,
            ty => ColumnSelector::by_type(ty),
        }
    }
}

/// Resolves a selector to a duplicate-free list of feature columns in table
/// order. Target and auxiliary columns are never returned.
pub fn resolve_selector(
    sel: &ColumnSelector,
    table: &Table,
    types: &FeatureTypeMap,
) -> Result<Vec<String>> {
    let features = table.feature_names();
    let out: Vec<String> = match sel {
        ColumnSelector::AllFeatures => features.iter().map(|s| s.to_string()).collect(),
        ColumnSelector::ByType(wanted) => {
            if let Some(bad) = wanted.iter().find(|t| !types.is_known_type(t)) {
                return Err(Error::UnknownFeatureType(bad.clone()));
            }
            features
                .iter()
                .filter(|c| wanted.iter().any(|t| t == types.type_of(c)))
                .map(|s| s.to_string())
                .collect()
        }
        ColumnSelector::ByName(names) => {
            for n in names {
                if !table.is_feature(n) {
                    return Err(Error::UnknownColumn(n.clone()));
                }
            }
            features
                .iter()
                .filter(|c| names.iter().any(|n| n == *c))
                .map(|s| s.to_string())
                .collect()
        }
    };
    if out.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(out)
}

/// Declared storage kinds for CSV ingestion; undeclared columns are inferred.
#[derive(Clone, Debug, Default)]
pub struct CsvSchema {
    pub numeric: Vec<String>,
    pub categorical: Vec<String>,
}

pub fn read_csv(path: impl AsRef<Path>, schema: Option<&CsvSchema>) -> Result<Table> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv_from(file, schema)
}

/// Parses RFC-4180 CSV with a mandatory header row.
pub fn read_csv_from<R: Read>(reader: R, schema: Option<&CsvSchema>) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(Error::NoHeader),
        Some(r) => r.map_err(|e| Error::Csv(e.to_string()))?,
    };
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    if names.len() == 1 && names[0].is_empty() {
        return Err(Error::NoHeader);
    }
    let mut seen = BTreeSet::new();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(Error::EmptyColumnName(i));
        }
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateColumn(n.clone()));
        }
    }
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); names.len()];
    let mut lines: Vec<u64> = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != names.len() {
            return Err(Error::RaggedRow {
                line,
                expected: names.len(),
                found: rec.len(),
            });
        }
        for (j, field) in rec.iter().enumerate() {
            if field.trim().is_empty() {
                return Err(Error::MissingValue {
                    column: names[j].clone(),
                    line,
                });
            }
            cells[j].push(field.to_string());
        }
        lines.push(line);
    }

    let declared_numeric = |n: &str| schema.is_some_and(|s| s.numeric.iter().any(|c| c == n));
    let declared_categorical =
        |n: &str| schema.is_some_and(|s| s.categorical.iter().any(|c| c == n));
    if let Some(s) = schema {
        for c in s.numeric.iter().chain(&s.categorical) {
            if !names.contains(c) {
                return Err(Error::UnknownColumn(c.clone()));
            }
        }
    }

    let mut columns = Vec::with_capacity(names.len());
    for (name, raw) in names.into_iter().zip(cells) {
        if declared_categorical(&name) {
            columns.push((name, Column::Categorical(raw)));
            continue;
        }
        let parsed: Vec<Option<f64>> = raw.iter().map(|s| s.trim().parse::<f64>().ok()).collect();
        let all_parse = parsed.iter().all(Option::is_some);
        if !all_parse {
            if declared_numeric(&name) {
                let row = parsed.iter().position(Option::is_none).unwrap_or(0);
                return Err(Error::NotParsable {
                    column: name,
                    line: lines[row],
                    value: raw[row].clone(),
                });
            }
            columns.push((name, Column::Categorical(raw)));
            continue;
        }
        let values: Vec<f64> = parsed.into_iter().map(|v| v.unwrap_or_default()).collect();
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                column: name,
                line: lines[row],
                value: raw[row].clone(),
            });
        }
        columns.push((name, Column::Numeric(values)));
    }
    Table::new(columns)
}

pub fn write_csv(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_csv_to(table, file)
}

/// Writes the table with numbers in shortest round-trip form.
pub fn write_csv_to<W: Write>(table: &Table, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(table.names()).map_err(csv_err)?;
    for i in 0..table.n_rows() {
        let row: Vec<String> = table.columns.iter().map(|c| c.cell(i)).collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Table> {
        read_csv_from(text.as_bytes(), None)
    }

    fn sample() -> (Table, FeatureTypeMap) {
        let t = Table::new(vec![
            ("f1".into(), Column::Numeric(vec![1.0, 2.0, 3.0])),
            ("age".into(), Column::Numeric(vec![30.0, 40.0, 50.0])),
            ("f2".into(), Column::Numeric(vec![0.5, 0.1, 0.2])),
            ("y".into(), Column::Numeric(vec![1.0, 0.0, 1.0])),
        ])
        .unwrap()
        .with_role("y", ColumnRole::Target)
        .unwrap();
        let types = FeatureTypeMap::new([("confound", ["age"])]).unwrap();
        (t, types)
    }

    #[test]
    fn infers_numeric_and_categorical() {
        let t = parse("a,b\n1,x\n2,y\n").unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.numeric("a").unwrap(), &[1.0, 2.0]);
        assert_eq!(t.categorical("b").unwrap(), &["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn empty_file_has_no_header() {
        assert!(matches!(parse(""), Err(Error::NoHeader)));
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = parse("a,b\n1,2\n3\n").unwrap_err();
        assert!(matches!(err, Error::RaggedRow { line: 3, .. }));
        assert!(err.to_string().contains("ragged row at line 3"));
    }

    #[test]
    fn duplicate_header_rejected() {
        assert!(matches!(parse("a,a\n1,2\n"), Err(Error::DuplicateColumn(_))));
    }

    #[test]
    fn missing_and_nan_cells_rejected() {
        assert!(matches!(parse("a,b\n1,\n2,3\n"), Err(Error::MissingValue { .. })));
        assert!(matches!(parse("a\n1\nNaN\n"), Err(Error::NonFinite { .. })));
        let schema = CsvSchema {
            numeric: vec!["a".into()],
            ..Default::default()
        };
        assert!(matches!(
            read_csv_from("a\n1\nx\n".as_bytes(), Some(&schema)),
            Err(Error::NotParsable { line: 3, .. })
        ));
    }

    #[test]
    fn declared_categorical_keeps_text() {
        let schema = CsvSchema {
            categorical: vec!["site".into()],
            ..Default::default()
        };
        let t = read_csv_from("site,v\n1,2\n2,3\n".as_bytes(), Some(&schema)).unwrap();
        assert!(!t.column("site").unwrap().is_numeric());
    }

    #[test]
    fn quoted_fields() {
        let t = parse("name,v\n\"a, b\",1\n\"c\"\"d\",2\n").unwrap();
        assert_eq!(t.categorical("name").unwrap()[0], "a, b");
        assert_eq!(t.categorical("name").unwrap()[1], "c\"d");
    }

    #[test]
    fn selector_by_type() {
        let (t, types) = sample();
        let cols = resolve_selector(&ColumnSelector::by_type("confound"), &t, &types).unwrap();
        assert_eq!(cols, vec!["age"]);
        let cols = resolve_selector(&ColumnSelector::by_type("continuous"), &t, &types).unwrap();
        assert_eq!(cols, vec!["f1", "f2"]);
    }

    #[test]
    fn wildcard_excludes_target() {
        let t = Table::new(vec![
            ("f1".into(), Column::Numeric(vec![1.0])),
            ("f2".into(), Column::Numeric(vec![2.0])),
            ("y".into(), Column::Numeric(vec![3.0])),
        ])
        .unwrap()
        .with_role("y", ColumnRole::Target)
        .unwrap();
        let cols =
            resolve_selector(&ColumnSelector::parse("*"), &t, &FeatureTypeMap::default()).unwrap();
        assert_eq!(cols, vec!["f1", "f2"]);
    }

    #[test]
    fn selector_errors() {
        let (t, types) = sample();
        assert!(matches!(
            resolve_selector(&ColumnSelector::by_type("missing"), &t, &types),
            Err(Error::UnknownFeatureType(_))
        ));
        assert!(matches!(
            resolve_selector(&ColumnSelector::by_type("categorical"), &t, &types),
            Err(Error::EmptySelection)
        ));
        assert!(matches!(
            resolve_selector(&ColumnSelector::ByName(vec!["y".into()]), &t, &types),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn by_name_is_table_ordered_and_deduplicated() {
        let (t, types) = sample();
        let sel = ColumnSelector::ByName(vec!["f2".into(), "f1".into(), "f2".into()]);
        assert_eq!(resolve_selector(&sel, &t, &types).unwrap(), vec!["f1", "f2"]);
    }

    #[test]
    fn conflicting_types_rejected() {
        let err = FeatureTypeMap::new([("confound", vec!["age"]), ("categorical", vec!["age"])])
            .unwrap_err();
        assert!(matches!(err, Error::ConflictingType { .. }));
    }

    #[test]
    fn type_map_validation() {
        let (t, _) = sample();
        let types = FeatureTypeMap::new([("confound", ["nope"])]).unwrap();
        assert!(matches!(types.validate(&t), Err(Error::UnknownColumn(_))));
    }

    #[test]
    fn column_swap_appends_features() {
        let (t, _) = sample();
        let out = t
            .with_columns_swapped(
                &["f1".to_string()],
                vec![("new".into(), Column::Numeric(vec![0.0; 3]))],
            )
            .unwrap();
        assert_eq!(out.names(), &["age", "f2", "y", "new"]);
        assert_eq!(out.role("y").unwrap(), ColumnRole::Target);
        assert!(out.is_feature("new"));
    }

    proptest! {
        #[test]
        fn numeric_csv_round_trip(values in proptest::collection::vec(
            prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e6..1e6f64],
            1..40,
        )) {
            let t = Table::new(vec![("x".into(), Column::Numeric(values.clone()))]).unwrap();
            let mut buf = Vec::new();
            write_csv_to(&t, &mut buf).unwrap();
            let back = read_csv_from(buf.as_slice(), None).unwrap();
            let got = back.numeric("x").unwrap();
            prop_assert_eq!(got.len(), values.len());
            for (a, b) in got.iter().zip(&values) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn selection_is_stable_subset(mask in proptest::collection::vec(0u8..3, 1..12)) {
            let cols: Vec<(String, Column)> = mask
                .iter()
                .enumerate()
                .map(|(i, _)| (format!("c{i}"), Column::Numeric(vec![i as f64])))
                .collect();
            let t = Table::new(cols).unwrap();
            let confounds: Vec<String> = mask
                .iter()
                .enumerate()
                .filter(|(_, m)| **m == 1)
                .map(|(i, _)| format!("c{i}"))
                .collect();
            let types = FeatureTypeMap::new([("confound", confounds)]).unwrap();
            for sel in [ColumnSelector::by_type("continuous"), ColumnSelector::by_type("confound"), ColumnSelector::AllFeatures] {
                match resolve_selector(&sel, &t, &types) {
                    Ok(a) => {
                        let b = resolve_selector(&sel, &t, &types).unwrap();
                        prop_assert_eq!(&a, &b);
                        let features = t.feature_names();
                        let positions: Vec<usize> = a.iter().map(|c| features.iter().position(|f| f == c).unwrap()).collect();
                        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
                    }
                    Err(e) => prop_assert!(matches!(e, Error::EmptySelection)),
                }
            }
        }
    }
}
