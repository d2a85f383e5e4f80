"""validate: model assumptions and frustration-freeness."""
from __future__ import annotations

import logging

from ffcorr.errors import EXIT_OK, EXIT_VALIDATION, NotFrustrationFreeError
from ffcorr.models import RunConfig, Violation, ViolationKind
from ffcorr.commands.common import CommandOutcome, resolve_specs
from ffcorr.services.hamiltonian import validate_spec
from ffcorr.services.results_writer import ResultTable
from ffcorr.services.spectral import ground_space

logger = logging.getLogger(__name__)


def cmd_validate(config: RunConfig) -> CommandOutcome:
    table = ResultTable(columns=["q", "n", "term_index", "kind", "detail"])
    valid = True
    for q, spec in resolve_specs(config):
        report = validate_spec(spec)
        violations = list(report.violations)
        if report.valid:
            try:
                basis = ground_space(spec, seed=config.seed)
                table.trailer.append(
                    f"q={'' if q is None else q} n={spec.n} degeneracy={basis.degeneracy} gap={basis.gap:.15g}"
                )
            except NotFrustrationFreeError as exc:
                violations.append(Violation(kind=ViolationKind.FRUSTRATED, detail=str(exc)))
        for violation in violations:
            table.rows.append([q, spec.n, violation.term_index, violation.kind.value, violation.detail])
        if violations:
            valid = False
            logger.info("n=%d: %d violations", spec.n, len(violations))
    return CommandOutcome(table=table, exit_code=EXIT_OK if valid else EXIT_VALIDATION)
