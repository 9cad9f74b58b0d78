"""
Synthetic workload generator
Random data policies, app policy and usage context for one benchmark point
"""
import hashlib
import logging
import random
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator
from rdflib import Graph, Literal, Namespace, URIRef

from policy.models import (
    INTEGRITY,
    NIL,
    PURPOSE,
    SECURITY,
    ActivationCondition,
    AppPolicy,
    Attribute,
    DataPolicySet,
    Downstream,
    Filter,
    InputSpec,
    Obligation,
    OutputSpec,
    Policy,
    Prohibition,
    Refinement,
    RefinementKind,
    Tag,
    TagSpec,
)
from policy.to_graph import app_policy_to_graph, policy_to_graph, usage_context_graph

logger = logging.getLogger(__name__)

BENCH = Namespace("http://bench.dtou.invalid/")

NUM_INPUTS = 4
BENCH_USER = BENCH["user/alice"]
BENCH_APP = BENCH["app/bench-shop"]
BENCH_TIME = "20230823"


class Variable(str, Enum):
    DATA_NUM_ATTRIBUTES = "data:numAttributes"
    DATA_NUM_SECURITY = "data:tag:numSecurity"
    DATA_NUM_INTEGRITY = "data:tag:numIntegrity"
    DATA_NUM_PURPOSE = "data:tag:numPurpose"
    DATA_NUM_PROHIBITION = "data:numProhibition"
    DATA_NUM_OBLIGATION = "data:numObligation"
    APP_NUM_DATA = "app:numData"
    APP_NUM_SECURITY = "app:numSecurity"
    APP_NUM_INTEGRITY = "app:numIntegrity"
    APP_NUM_PURPOSE = "app:numPurpose"
    APP_NUM_OUTPUT = "app:output:numOutput"
    APP_NUM_DELETE = "app:output:numDelete"
    APP_NUM_EDIT = "app:output:numEdit"


# Variables the published study names; the others fill the grid symmetrically
STUDIED = frozenset({
    Variable.DATA_NUM_SECURITY,
    Variable.APP_NUM_DATA,
    Variable.APP_NUM_SECURITY,
    Variable.APP_NUM_INTEGRITY,
    Variable.APP_NUM_PURPOSE,
    Variable.APP_NUM_OUTPUT,
    Variable.APP_NUM_DELETE,
})

DEFAULT_COUNTS: Dict[Variable, int] = {variable: 10 for variable in Variable}
DEFAULT_COUNTS[Variable.DATA_NUM_ATTRIBUTES] = 100


def is_extension(variable: Variable) -> bool:
    return variable not in STUDIED


class WorkloadSpec(BaseModel):
    """One benchmark sweep: a variable, its values, and everything held fixed"""
    variable: Variable
    values: List[int] = Field(default_factory=lambda: [10, 100, 1000])
    fixed_defaults: Dict[Variable, int] = Field(default_factory=lambda: dict(DEFAULT_COUNTS))
    repeats: int = Field(default=10, ge=1)
    seed: int = 0
    overlap: float = Field(default=0.5, ge=0.0, le=1.0,
                           description="Share of app descriptors drawn from the data tags")
    timeout: float = Field(default=60.0, gt=0, description="Per-run timeout in seconds")
    track_memory: bool = Field(default=False, description="Record peak memory with tracemalloc")
    subtasks: bool = Field(default=False, description="Also time each conflict kind separately")
    endpoint: Optional[str] = Field(default=None, description="Base URL of a running service (HTTP mode)")

    @field_validator("values")
    @classmethod
    def _non_negative(cls, values: List[int]) -> List[int]:
        if any(value < 0 for value in values):
            raise ValueError("values must be non-negative")
        return values

    def counts(self, value: int) -> Dict[Variable, int]:
        counts = {**DEFAULT_COUNTS, **self.fixed_defaults}
        counts[self.variable] = value
        return counts


def _rng(seed: int, variable: Variable, value: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{variable.value}|{value}".encode("utf-8")).hexdigest()
    return random.Random(int(digest[:16], 16))


class _Generator:
    """Draws every generated term from one seeded random stream"""

    def __init__(self, counts: Dict[Variable, int], rng: random.Random, overlap: float):
        self.counts = counts
        self.rng = rng
        self.overlap = overlap
        self.class_pool = max(10, counts[Variable.DATA_NUM_ATTRIBUTES])
        self.purpose_pool = [BENCH[f"purpose/{i}"] for i in range(max(10, counts[Variable.APP_NUM_PURPOSE]))]

    def _class(self) -> URIRef:
        return BENCH[f"class/{self.rng.randrange(self.class_pool)}"]

    def _condition(self) -> ActivationCondition:
        field = self.rng.choice(("user", "app_name", "purpose"))
        hit = self.rng.random() < self.overlap
        if field == "user":
            return ActivationCondition(user=BENCH_USER if hit else BENCH["user/other"])
        if field == "app_name":
            return ActivationCondition(app_name=BENCH_APP if hit else BENCH["app/other"])
        return ActivationCondition(purpose=self.rng.choice(self.purpose_pool))

    def data_policy(self, index: int, uri: URIRef) -> DataPolicySet:
        prefix = f"d{index}"
        attributes = [
            Attribute(
                id=BENCH[f"{prefix}/attr{j}"],
                name=BENCH[f"name/{j}"],
                class_=self._class(),
                value=NIL if self.rng.random() < 0.5 else Literal(f"value-{self.rng.randrange(self.class_pool)}"),
            )
            for j in range(self.counts[Variable.DATA_NUM_ATTRIBUTES])
        ]
        by_id = {attribute.id: attribute for attribute in attributes}
        ids = list(by_id)

        def pick() -> URIRef:
            return self.rng.choice(ids)

        tags = []
        for category, variable in ((SECURITY, Variable.DATA_NUM_SECURITY),
                                   (INTEGRITY, Variable.DATA_NUM_INTEGRITY),
                                   (PURPOSE, Variable.DATA_NUM_PURPOSE)):
            if not ids:
                break
            for t in range(self.counts[variable]):
                ref = pick()
                tags.append(Tag(
                    id=BENCH[f"{prefix}/{category.split('#')[-1].lower()}-tag{t}"],
                    category=category, attribute_ref=ref, descriptor=by_id[ref].class_,
                    validity_bindings=frozenset({pick()}),
                ))
        prohibitions = [
            Prohibition(id=BENCH[f"{prefix}/prohibition{p}"], condition=self._condition(),
                        validity_bindings=frozenset({pick()}) if ids else frozenset())
            for p in range(self.counts[Variable.DATA_NUM_PROHIBITION])
        ]
        obligations = [
            Obligation(
                id=BENCH[f"{prefix}/obligation{o}"],
                obligation_class=BENCH[f"obligation/{o % 10}"],
                args=tuple(pick() for _ in range(self.rng.randint(1, 2))) if ids else (),
                condition=self._condition(),
                validity_bindings=frozenset({pick()}) if ids else frozenset(),
            )
            for o in range(self.counts[Variable.DATA_NUM_OBLIGATION])
        ]
        policy = Policy(id=BENCH[f"{prefix}/policy"], attributes=tuple(attributes), tags=tuple(tags),
                        prohibitions=tuple(prohibitions), obligations=tuple(obligations))
        return DataPolicySet(data_node=BENCH[f"{prefix}/data"], uri=uri, policy=policy)

    def _descriptors(self, count: int, known: List[URIRef], category: str) -> List[URIRef]:
        chosen = []
        for i in range(count):
            if known and self.rng.random() < self.overlap:
                chosen.append(self.rng.choice(known))
            else:
                chosen.append(BENCH[f"absent/{category}/{i}"])
        return chosen

    def app_policy(self, data_policies: List[DataPolicySet], uris: List[URIRef]) -> AppPolicy:
        inputs = []
        for i, uri in enumerate(uris):
            paired = [p for p in data_policies if p.uri == uri]

            def descriptors_of(category):
                return sorted({t.descriptor for p in paired for t in p.policy.tags if t.category == category}, key=str)

            provides = self._descriptors(self.counts[Variable.APP_NUM_SECURITY], descriptors_of(SECURITY), "security")
            expects = self._descriptors(self.counts[Variable.APP_NUM_INTEGRITY], descriptors_of(INTEGRITY), "integrity")
            purposes = self._descriptors(self.counts[Variable.APP_NUM_PURPOSE], descriptors_of(PURPOSE), "purpose")
            inputs.append(InputSpec(
                id=BENCH[f"app/input{i}"],
                port_name=f"in{i}",
                data_uri=uri,
                provides=frozenset(TagSpec(category=SECURITY, descriptor=d) for d in provides),
                expects=frozenset(TagSpec(category=INTEGRITY, descriptor=d) for d in expects),
                purposes=frozenset(purposes),
                downstreams=(Downstream(app_name=BENCH[f"downstream/{i}"],
                                        purpose=self.rng.choice(self.purpose_pool)),),
            ))

        # Outputs only read inputs that some data policy covers
        covered = {policy_set.uri for policy_set in data_policies}
        ports = [spec.port_name for spec in inputs if spec.data_uri in covered]
        edit_ports = ports or [spec.port_name for spec in inputs]
        outputs = []
        for o in range(self.counts[Variable.APP_NUM_OUTPUT]):
            refinements = [
                Refinement(id=BENCH[f"app/out{o}/delete{r}"], kind=RefinementKind.DELETE,
                           filter=Filter(class_=self._class()))
                for r in range(self.counts[Variable.APP_NUM_DELETE])
            ]
            refinements += [
                Refinement(
                    id=BENCH[f"app/out{o}/edit{r}"], kind=RefinementKind.EDIT,
                    filter=Filter(input_port=self.rng.choice(edit_ports),
                                  name=BENCH[f"name/{self.rng.randrange(max(1, self.counts[Variable.DATA_NUM_ATTRIBUTES]))}"]),
                    new_class=self._class(), new_value=Literal("edited"),
                )
                for r in range(self.counts[Variable.APP_NUM_EDIT])
            ]
            outputs.append(OutputSpec(id=BENCH[f"app/out{o}"], port_name=f"out{o}",
                                      from_ports=tuple(ports), refinements=tuple(refinements)))
        return AppPolicy(id=BENCH["app/policy"], name=BENCH_APP, inputs=tuple(inputs), outputs=tuple(outputs))


def generate_models(spec: WorkloadSpec, value: int, seed: Optional[int] = None) -> Tuple[List[DataPolicySet], AppPolicy]:
    """
    Typed policies for one benchmark point

    Data policies are spread round-robin over the fixed input uris, so
    app:numData controls how many policies pair with each input.
    """
    counts = spec.counts(value)
    generator = _Generator(counts, _rng(spec.seed if seed is None else seed, spec.variable, value), spec.overlap)
    uris = [BENCH[f"data/{i}"] for i in range(NUM_INPUTS)]
    data_policies = [generator.data_policy(k, uris[k % NUM_INPUTS]) for k in range(counts[Variable.APP_NUM_DATA])]
    return data_policies, generator.app_policy(data_policies, uris)


def generate_policies(spec: WorkloadSpec, value: int, seed: Optional[int] = None) -> Tuple[List[Graph], Graph, Graph]:
    """
    Graphs for one benchmark point

    Args:
        spec: Workload being swept
        value: Count for spec.variable
        seed: Overrides spec.seed

    Returns:
        (one graph per data policy, app policy graph, usage context graph)
    """
    data_policies, app = generate_models(spec, value, seed)
    data_graphs = [policy_to_graph(policy_set) for policy_set in data_policies]
    logger.debug(f"Generated {spec.variable.value}={value}: {len(data_graphs)} data policies")
    return data_graphs, app_policy_to_graph(app), usage_context_graph(BENCH_USER, app.id, BENCH_TIME)


__all__ = [
    "BENCH",
    "DEFAULT_COUNTS",
    "NUM_INPUTS",
    "Variable",
    "WorkloadSpec",
    "generate_models",
    "generate_policies",
    "is_extension",
]
