use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five parties' shares of the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    /// Alice's side information.
    A,
    /// Alice's share to be sent to Bob.
    #[serde(rename = "C_A")]
    CA,
    /// Bob's side information.
    B,
    /// Bob's share to be sent to Alice.
    #[serde(rename = "C_B")]
    CB,
    /// The referee (reference system).
    R,
}

impl Role {
    pub const ALL: [Role; 5] = [Role::A, Role::CA, Role::B, Role::CB, Role::R];

    pub fn name(self) -> &'static str {
        match self {
            Role::A => "A",
            Role::CA => "C_A",
            Role::B => "B",
            Role::CB => "C_B",
            Role::R => "R",
        }
    }

    pub fn from_name(name: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.name() == name)
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

impl Factor {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Factor {
            label: label.into(),
            dim,
        }
    }
}

/// Ordered tensor factors and their assignment to the five roles.
///
/// Amplitudes over a layout are indexed row-major in factor order: the last
/// factor varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    factors: Vec<Factor>,
    roles: [Vec<usize>; 5],
    index: HashMap<String, usize>,
}

impl SubsystemLayout {
    /// Builds a layout from factors and a role assignment given by labels.
    ///
    /// A role missing from `roles` is trivial. Every factor must belong to
    /// exactly one role and both C_A and C_B must be nonempty. Wherever a
    /// label coincides with a role name, [`resolve`](Self::resolve) picks the
    /// role.
    pub fn new(factors: Vec<Factor>, roles: &[(Role, Vec<String>)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(factors.len());
        for (i, f) in factors.iter().enumerate() {
            if f.dim < 2 {
                return Err(Error::InvalidLayout(format!(
                    "factor `{}` has dimension {} (must be at least 2)",
                    f.label, f.dim
                )));
            }
            if index.insert(f.label.clone(), i).is_some() {
                return Err(Error::InvalidLayout(format!("duplicate factor label `{}`", f.label)));
            }
        }

        let mut role_lists: [Vec<usize>; 5] = Default::default();
        let mut seen_roles = [false; 5];
        let mut owner: Vec<Option<Role>> = vec![None; factors.len()];
        for (role, labels) in roles {
            if std::mem::replace(&mut seen_roles[role.slot()], true) {
                return Err(Error::InvalidLayout(format!("role {role} assigned twice")));
            }
            for label in labels {
                let &i = index
                    .get(label)
                    .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
                if let Some(prev) = owner[i] {
                    return Err(Error::InvalidLayout(format!(
                        "factor `{label}` assigned to both {prev} and {role}"
                    )));
                }
                owner[i] = Some(*role);
                role_lists[role.slot()].push(i);
            }
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidLayout(format!(
                "factor `{}` is not assigned to any role",
                factors[i].label
            )));
        }
        for role in [Role::CA, Role::CB] {
            if role_lists[role.slot()].is_empty() {
                return Err(Error::InvalidLayout(format!("role {role} must be nonempty")));
            }
        }
        let layout = SubsystemLayout {
            factors,
            roles: role_lists,
            index,
        };
        if layout.total_dim() < 2 {
            return Err(Error::InvalidLayout("total dimension must be at least 2".into()));
        }
        Ok(layout)
    }

    /// Convenience constructor: one factor per role with the given dims,
    /// labelled by the role name. A dimension of 1 leaves the role trivial.
    pub fn per_role(dims: [usize; 5]) -> Result<Self> {
        let mut factors = Vec::new();
        let mut roles = Vec::new();
        for (role, &d) in Role::ALL.iter().zip(dims.iter()) {
            if d == 1 {
                continue;
            }
            factors.push(Factor::new(role.name(), d));
            roles.push((*role, vec![role.name().to_string()]));
        }
        SubsystemLayout::new(factors, &roles)
    }

    /// Five qubits, one per role.
    pub fn five_qubits() -> Self {
        SubsystemLayout::per_role([2; 5]).expect("valid layout")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Factor indices of a role, in role-list order.
    pub fn role_indices(&self, role: Role) -> &[usize] {
        &self.roles[role.slot()]
    }

    pub fn role_labels(&self, role: Role) -> Vec<&str> {
        self.roles[role.slot()]
            .iter()
            .map(|&i| self.factors[i].label.as_str())
            .collect()
    }

    pub fn role_dim(&self, role: Role) -> usize {
        self.roles[role.slot()]
            .iter()
            .map(|&i| self.factors[i].dim)
            .product()
    }

    pub fn is_trivial(&self, role: Role) -> bool {
        self.roles[role.slot()].is_empty()
    }

    pub fn role_of(&self, factor: usize) -> Role {
        Role::ALL
            .into_iter()
            .find(|r| self.roles[r.slot()].contains(&factor))
            .expect("every factor has a role")
    }

    /// Resolves role names and factor labels to a sorted set of factor indices.
    pub fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in names {
            let name = name.as_ref();
            if let Some(role) = Role::from_name(name) {
                out.extend_from_slice(&self.roles[role.slot()]);
            } else if let Some(i) = self.index_of(name) {
                out.push(i);
            } else {
                return Err(Error::UnknownLabel(name.to_string()));
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Same factors with the label lists of two roles exchanged.
    pub fn with_roles_swapped(&self, a: Role, b: Role) -> Self {
        let mut out = self.clone();
        out.roles.swap(a.slot(), b.slot());
        out
    }

    /// Appends the factors of `other` after this layout's factors, merging
    /// role lists role by role.
    pub fn tensor(&self, other: &SubsystemLayout) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        let roles: Vec<(Role, Vec<String>)> = Role::ALL
            .into_iter()
            .map(|r| {
                let mut labels: Vec<String> =
                    self.role_labels(r).into_iter().map(String::from).collect();
                labels.extend(other.role_labels(r).into_iter().map(String::from));
                (r, labels)
            })
            .collect();
        SubsystemLayout::new(factors, &roles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles(list: &[(Role, &[&str])]) -> Vec<(Role, Vec<String>)> {
        list.iter()
            .map(|(r, ls)| (*r, ls.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    #[test]
    fn per_role_layout() {
        let l = SubsystemLayout::five_qubits();
        assert_eq!(l.total_dim(), 32);
        assert_eq!(l.role_labels(Role::CB), vec!["C_B"]);
        assert_eq!(l.resolve(&["C_B", "A"]).unwrap(), vec![0, 3]);
    }

    #[test]
    fn trivial_roles_allowed_but_not_for_exchanged_parts() {
        let l = SubsystemLayout::per_role([1, 2, 1, 2, 1]).unwrap();
        assert!(l.is_trivial(Role::A));
        assert_eq!(l.role_dim(Role::R), 1);
        assert!(SubsystemLayout::per_role([2, 1, 2, 2, 2]).is_err());
    }

    #[test]
    fn rejects_unassigned_and_duplicate() {
        let f = vec![Factor::new("x", 2), Factor::new("y", 2)];
        let err = SubsystemLayout::new(f.clone(), &roles(&[(Role::CA, &["x"])])).unwrap_err();
        assert!(matches!(err, Error::InvalidLayout(_)));
        let err = SubsystemLayout::new(
            f.clone(),
            &roles(&[(Role::CA, &["x"]), (Role::CB, &["x", "y"])]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidLayout(_)));
        let dup = vec![Factor::new("x", 2), Factor::new("x", 2)];
        assert!(SubsystemLayout::new(dup, &roles(&[(Role::CA, &["x"])])).is_err());
    }

    #[test]
    fn role_names_take_precedence_over_labels() {
        let f = vec![Factor::new("A", 2), Factor::new("y", 2), Factor::new("z", 2)];
        let l = SubsystemLayout::new(
            f,
            &roles(&[(Role::A, &["z"]), (Role::CA, &["A"]), (Role::CB, &["y"])]),
        )
        .unwrap();
        assert_eq!(l.resolve(&["A"]).unwrap(), vec![2]);
        assert_eq!(l.resolve(&["C_A"]).unwrap(), vec![0]);
    }

    #[test]
    fn swapping_roles_is_an_involution() {
        let l = SubsystemLayout::five_qubits();
        let s = l.with_roles_swapped(Role::CA, Role::CB);
        assert_eq!(s.role_indices(Role::CA), &[3]);
        assert_eq!(s.with_roles_swapped(Role::CA, Role::CB), l);
    }

    #[test]
    fn unknown_label() {
        let l = SubsystemLayout::five_qubits();
        assert_eq!(l.resolve(&["Q"]), Err(Error::UnknownLabel("Q".into())));
    }
}
