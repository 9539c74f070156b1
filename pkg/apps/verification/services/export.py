from typing import Iterator, List

from ..models import CheckReport
from .exploration import Lts


def _quote(text: str) -> str:
    return '"{}"'.format(text.replace('"', r'\"'))


def graphviz(lts: Lts) -> Iterator[str]:
    """
    Produce el LTS en lenguaje DOT, una línea por elemento.
    Nodos: resumen del estado (inicial en doble octágono, terminales en doble círculo).
    """
    yield 'digraph "lts" {\n'
    yield '  rankdir=LR;\n'
    for index, state in enumerate(lts.states):
        if index == 0:
            shape = 'doubleoctagon'
        elif lts.is_terminal(index):
            shape = 'doublecircle'
        else:
            shape = 'circle'
        yield '  {} [shape={} label={}];\n'.format(
            _quote(state.digest), shape, _quote(f"{state.digest}\\n{state.phase.label}"))
    for edge in lts.edges:
        text = ';'.join(str(label) for label in (edge.label,) + edge.emitted)
        yield '  {} -> {} [label={}];\n'.format(
            _quote(lts.states[edge.source].digest), _quote(lts.states[edge.target].digest), _quote(text))
    yield '}\n'


def to_file(filename: str, lts: Lts) -> None:
    with open(filename, 'w', encoding='utf-8') as f:
        f.writelines(graphviz(lts))


def report_lines(report: CheckReport, verbose: bool = False) -> List[str]:
    """
    Texto de un veredicto: `<id> HOLDS|FAILS states=<n> transitions=<m>` y,
    si falla, el contraejemplo (solo etiquetas, o con resúmenes en modo detallado)
    """
    verdict = 'HOLDS' if report.holds else 'FAILS'
    lines = [f"{report.property.value} {verdict} states={report.stats.states} "
             f"transitions={report.stats.transitions}"]
    trace = report.counterexample
    if trace is None:
        return lines
    if verbose:
        lines.append(f"  counterexample from {trace.initial_digest}:")
        lines.extend(f"    {line}" for line in trace.lines())
    else:
        labels = ' '.join(str(label) for label in trace.flat_labels()) or '(initial state)'
        lines.append(f"  counterexample: {labels}")
    return lines
