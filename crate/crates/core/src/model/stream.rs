use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::index::AtomIndex;
use super::object::{ObjectRef, ObjectRegistry, Payload};
use super::predicate::{Args, Atom, PredicateId, PredicateTable};
use super::schema::{Arg, AtomPattern, PatternBuilder};
use crate::{Cost, Error, Result};

#[derive(Debug, Clone, thiserror::Error)]
#[error("{0}")]
pub struct GeneratorError(pub String);

/// A possibly infinite sequence of output tuples.
pub trait Generator: Send {
    /// Next tuple, or `None` once the sequence is exhausted.
    fn next_tuple(&mut self) -> std::result::Result<Option<Vec<Payload>>, GeneratorError>;
}

struct IterGenerator<I>(I);

impl<I: Iterator<Item = Vec<Payload>> + Send> Generator for IterGenerator<I> {
    fn next_tuple(&mut self) -> std::result::Result<Option<Vec<Payload>>, GeneratorError> {
        Ok(self.0.next())
    }
}

/// Wraps any iterator of tuples as a generator.
pub fn from_iter<I>(iter: I) -> Box<dyn Generator>
where
    I: IntoIterator<Item = Vec<Payload>>,
    I::IntoIter: Send + 'static,
{
    Box::new(IterGenerator(iter.into_iter()))
}

pub type GeneratorFn = Arc<dyn Fn(&[Payload]) -> Box<dyn Generator> + Send + Sync>;
pub type CertificateCheck = Arc<dyn Fn(&[Payload], &[Payload]) -> bool + Send + Sync>;

/// Conditional generator schema.
///
/// Variables `0..inputs.len()` are inputs, the rest are outputs. A stream
/// with no outputs is a test: its generator yields `()` once when the test
/// passes and nothing otherwise.
#[derive(Clone)]
pub struct StreamSchema<C> {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub inp: Vec<AtomPattern>,
    pub out: Vec<AtomPattern>,
    pub gen: GeneratorFn,
    /// Evaluate as soon as an instance is enabled. Only valid for tests.
    pub eager: bool,
    /// Cost of the corresponding stream operator in the focused solver.
    pub meta_cost: C,
    pub checker: Option<CertificateCheck>,
}

impl<C> fmt::Debug for StreamSchema<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StreamSchema")
            .field("name", &self.name)
            .field("inputs", &self.inputs)
            .field("outputs", &self.outputs)
            .field("eager", &self.eager)
            .finish_non_exhaustive()
    }
}

impl<C: Cost> StreamSchema<C> {
    pub fn build(name: &str, inputs: &[&str], outputs: &[&str]) -> StreamBuilder<C> {
        let all: Vec<&str> = inputs.iter().chain(outputs).copied().collect();
        StreamBuilder {
            inner: PatternBuilder::new(name, &all),
            n_inputs: inputs.len(),
            out: Vec::new(),
            gen: None,
            eager: false,
            meta_cost: C::one(),
            checker: None,
        }
    }
}

impl<C> StreamSchema<C> {
    pub fn is_test(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    pub fn certified_atoms(&self, inputs: &[ObjectRef], outputs: &[ObjectRef]) -> Vec<Atom> {
        let binding: Vec<ObjectRef> = inputs.iter().chain(outputs).copied().collect();
        self.out.iter().map(|p| p.ground(&binding)).collect()
    }

    pub fn input_atoms(&self, inputs: &[ObjectRef]) -> Vec<Atom> {
        self.inp.iter().map(|p| p.ground(inputs)).collect()
    }
}

pub struct StreamBuilder<C> {
    inner: PatternBuilder,
    n_inputs: usize,
    out: Vec<AtomPattern>,
    gen: Option<GeneratorFn>,
    eager: bool,
    meta_cost: C,
    checker: Option<CertificateCheck>,
}

impl<C: Cost> StreamBuilder<C> {
    pub fn inp(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let p = self.inner.pattern(predicate, args);
        self.inner.stat.push(p);
        self
    }

    pub fn out(mut self, predicate: PredicateId, args: Vec<Arg>) -> Self {
        let p = self.inner.pattern(predicate, args);
        self.out.push(p);
        self
    }

    pub fn generator<F>(mut self, f: F) -> Self
    where
        F: Fn(&[Payload]) -> Box<dyn Generator> + Send + Sync + 'static,
    {
        self.gen = Some(Arc::new(f));
        self
    }

    /// Generator for a test stream from a boolean predicate on input payloads.
    pub fn test<F>(self, f: F) -> Self
    where
        F: Fn(&[Payload]) -> bool + Send + Sync + 'static,
    {
        self.generator(move |inputs| {
            let pass = f(inputs);
            from_iter(if pass { Some(Vec::new()) } else { None })
        })
    }

    pub fn eager(mut self, eager: bool) -> Self {
        self.eager = eager;
        self
    }

    pub fn meta_cost(mut self, cost: C) -> Self {
        self.meta_cost = cost;
        self
    }

    /// Independent check of `(inputs, outputs)` run on every drawn tuple when enabled.
    pub fn checker<F>(mut self, f: F) -> Self
    where
        F: Fn(&[Payload], &[Payload]) -> bool + Send + Sync + 'static,
    {
        self.checker = Some(Arc::new(f));
        self
    }

    pub fn finish(mut self) -> Result<StreamSchema<C>> {
        if let Some(e) = self.inner.error.take() {
            return Err(e);
        }
        let name = self.inner.name.clone();
        let invalid = |reason: &str| Error::InvalidSchema {
            schema: name.clone(),
            reason: reason.to_string(),
        };
        let gen = self.gen.ok_or_else(|| invalid("stream without generator"))?;
        let outputs = self.inner.params.split_off(self.n_inputs);
        if self.eager && !outputs.is_empty() {
            return Err(invalid("only test streams may be eager"));
        }
        if !self.meta_cost.is_non_negative() {
            return Err(invalid("negative meta cost"));
        }
        for p in &self.inner.stat {
            if p.vars().any(|v| v >= self.n_inputs) {
                return Err(invalid("input condition mentions an output"));
            }
        }
        Ok(StreamSchema {
            name: self.inner.name,
            inputs: self.inner.params,
            outputs,
            inp: self.inner.stat,
            out: self.out,
            gen,
            eager: self.eager,
            meta_cost: self.meta_cost,
            checker: self.checker,
        })
    }
}

/// Identity of a stream instance: the schema position and the input tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct InstanceKey {
    pub stream: usize,
    pub inputs: Args,
}

/// Result of one draw from an instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Draw {
    Tuple {
        outputs: Vec<ObjectRef>,
        certified: Vec<Atom>,
    },
    Exhausted,
}

/// Stateful generator bound to an input tuple.
pub struct StreamInstance {
    pub key: InstanceKey,
    generator: Option<Box<dyn Generator>>,
    exhausted: bool,
    /// Generator invocations so far.
    pub calls: u64,
    /// Tuples produced so far.
    pub produced: u64,
}

impl fmt::Debug for StreamInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StreamInstance")
            .field("key", &self.key)
            .field("exhausted", &self.exhausted)
            .field("calls", &self.calls)
            .finish()
    }
}

/// Creates an instance after checking its input conditions against `certified`.
pub fn instantiate_stream<C>(
    stream: usize,
    schema: &StreamSchema<C>,
    inputs: &[ObjectRef],
    certified: &AtomIndex,
    predicates: &PredicateTable,
    registry: &ObjectRegistry,
) -> Result<StreamInstance> {
    if inputs.len() != schema.inputs.len() {
        return Err(Error::ArityMismatch {
            stream: schema.name.clone(),
            expected: schema.inputs.len(),
            got: inputs.len(),
        });
    }
    let missing: Vec<String> = schema
        .input_atoms(inputs)
        .into_iter()
        .filter(|a| !certified.contains(a))
        .map(|a| a.render(predicates, registry))
        .collect();
    if !missing.is_empty() {
        return Err(Error::InputConditionsUnmet {
            stream: schema.name.clone(),
            missing,
        });
    }
    Ok(StreamInstance::new(InstanceKey {
        stream,
        inputs: inputs.iter().copied().collect(),
    }))
}

impl StreamInstance {
    /// Creates an instance without checking input conditions.
    pub fn new(key: InstanceKey) -> Self {
        StreamInstance {
            key,
            generator: None,
            exhausted: false,
            calls: 0,
            produced: 0,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Draws the next tuple, interning its objects.
    ///
    /// Exhaustion is sticky: once reported, later draws return
    /// [`Draw::Exhausted`] without invoking the generator. A test instance is
    /// marked exhausted right after it passes, so it is evaluated at most once.
    pub fn next_tuple<C>(
        &mut self,
        schema: &StreamSchema<C>,
        registry: &mut ObjectRegistry,
        check_certificates: bool,
    ) -> Result<Draw> {
        if self.exhausted {
            return Ok(Draw::Exhausted);
        }
        let inputs: Vec<Payload> = self
            .key
            .inputs
            .iter()
            .map(|&o| registry.payload(o).clone())
            .collect();
        let fault = |message: String, registry: &ObjectRegistry| Error::GeneratorFault {
            stream: schema.name.clone(),
            inputs: registry.names(&self.key.inputs),
            message,
        };
        if inputs.iter().any(Payload::contains_abstract) {
            return Err(fault("abstract input".into(), registry));
        }
        let gen = self.generator.get_or_insert_with(|| (schema.gen)(&inputs));
        self.calls += 1;
        let next = gen.next_tuple();
        let values = match next {
            Err(e) => return Err(fault(e.0, registry)),
            Ok(None) => {
                self.exhausted = true;
                self.generator = None;
                return Ok(Draw::Exhausted);
            }
            Ok(Some(values)) => values,
        };
        if values.len() != schema.outputs.len() {
            return Err(fault(
                format!(
                    "expected {} outputs, got {}",
                    schema.outputs.len(),
                    values.len()
                ),
                registry,
            ));
        }
        if values.iter().any(Payload::contains_abstract) {
            return Err(fault("abstract output".into(), registry));
        }
        if check_certificates {
            if let Some(check) = &schema.checker {
                if !check(&inputs, &values) {
                    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                    return Err(fault(
                        format!("certificate check failed for ({})", shown.join(", ")),
                        registry,
                    ));
                }
            }
        }
        let outputs: Vec<ObjectRef> = values.into_iter().map(|v| registry.intern(v)).collect();
        let certified = schema.certified_atoms(&self.key.inputs, &outputs);
        self.produced += 1;
        if schema.is_test() {
            self.exhausted = true;
            self.generator = None;
        }
        Ok(Draw::Tuple { outputs, certified })
    }
}

pub type InstanceId = usize;

/// Owns every instance created during a run, keyed by identity.
#[derive(Debug, Default)]
pub struct InstancePool {
    instances: Vec<StreamInstance>,
    ids: FxHashMap<InstanceKey, InstanceId>,
}

impl InstancePool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `key`, creating the instance if needed. The flag is true for new instances.
    pub fn get_or_insert(&mut self, key: InstanceKey) -> (InstanceId, bool) {
        if let Some(&id) = self.ids.get(&key) {
            return (id, false);
        }
        let id = self.instances.len();
        self.ids.insert(key.clone(), id);
        self.instances.push(StreamInstance::new(key));
        (id, true)
    }

    pub fn lookup(&self, key: &InstanceKey) -> Option<InstanceId> {
        self.ids.get(key).copied()
    }

    pub fn get(&self, id: InstanceId) -> &StreamInstance {
        &self.instances[id]
    }

    pub fn get_mut(&mut self, id: InstanceId) -> &mut StreamInstance {
        &mut self.instances[id]
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &StreamInstance> {
        self.instances.iter()
    }
}
