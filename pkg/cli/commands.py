"""
CLI Command Handler

Implements the command-line interface for QMaxFlow. Every command prints
one machine-readable report (JSON or CSV) on stdout; diagnostics go to
stderr and the log file.
"""

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config import get_config
from core.entropy import entanglement_entropy, estimate_mee
from core.errors import InputError, ParameterError, QMaxFlowError
from core.flow import has_loopfree_power_flow, min_product_cut
from core.netgraph import Network, parse_network
from core.qmf import (SCALING_HEADER, construct_path_tensors, estimate_qmf, estimate_qmf_v2,
                      ghz_decompose, min_capacity_bound, qmf_family_2n2jk, qmf_family_grid,
                      qmf_lower_bound, scaling_experiment, verify_rk3_symmetry)
from core.qsat import (check_claim_four_qudit, check_claim_three_qudit, kernel_dim_bound,
                       parse_qsat, stable_kernel_dim)
from core.tensor import ComplexFloat, check_dimension, domain_from_name
from cli.corpus import CORPUS_HEADER, CorpusRunner, build_corpus
from logger import get_logger, log_error, set_console_level
from utils.seeding import rng_for


logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

FAMILY_HEADER = ("n", "j", "k", "qmc", "expected_qmc", "bound", "sampled", "trials", "ratio", "bound_ratio")


def _complex_pairs(values: np.ndarray) -> list:
    values = np.asarray(values, dtype=np.complex128)
    return np.stack([values.real, values.imag], axis=-1).tolist()


def _edge_ids(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ParameterError(f"expected comma-separated edge ids, got {text!r}") from None


class CLIHandler:
    """
    Handles command-line interface operations.

    Each ``handle_<command>`` returns a report payload; ``handle`` prints it
    and maps errors to exit codes.
    """

    def __init__(self, stdout=None):
        """
        Initialize CLI handler.

        Args:
            stdout: Stream for reports (sys.stdout by default)
        """
        self.config = get_config()
        self.stdout = stdout
        self.parser = self._create_parser()

    def _create_parser(self) -> argparse.ArgumentParser:
        """
        Create argument parser.

        Returns:
            Configured ArgumentParser instance
        """
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--trials', type=int, help='Random assignments per estimate')
        common.add_argument('--seed', type=int, help='Base seed')
        common.add_argument('--prime', type=int, help='Prime field modulus')
        common.add_argument('--domain', choices=['field', 'complex'], help='Scalar domain for sampling')
        common.add_argument('--rtol', type=float, help='Relative threshold for numeric rank (eigenvalue cutoff for ee)')
        common.add_argument('--format', choices=['json', 'csv'], default='json', help='Report format')
        common.add_argument('--max-dim', type=int, help='Cap on input dimension times output dimension')
        common.add_argument('-v', '--verbose', action='store_true', help='Log progress to stderr')

        parser = argparse.ArgumentParser(
            prog='qmaxflow',
            description='QMaxFlow - quantum max-flow and min-cut of tensor networks'
        )
        subparsers = parser.add_subparsers(dest='command', help='Available commands')

        qmc_parser = subparsers.add_parser('qmc', parents=[common], help='Quantum min-cut')
        qmc_parser.add_argument('network', help='Network file')
        qmc_parser.add_argument('--show-cut', action='store_true', help='Include the minimizing edges')

        for name, help_text in (('qmf', 'Sampled quantum max-flow'),
                                ('qmf2', 'Sampled max-flow with shared tensors per valence type')):
            sub = subparsers.add_parser(name, parents=[common], help=help_text)
            sub.add_argument('network', help='Network file')
            sub.add_argument('--all-trials', action='store_true',
                             help='Run every trial even after reaching the min cut')

        ee_parser = subparsers.add_parser('ee', parents=[common], help='Entanglement entropy')
        ee_parser.add_argument('network', help='Network file')
        ee_parser.add_argument('--path-tensors', type=int, metavar='D',
                               help='Use the path-tensor assignment for base D instead of sampling')

        qsat_parser = subparsers.add_parser('qsat', parents=[common], help='Generic QSAT kernel dimension')
        qsat_parser.add_argument('instance', help='QSAT instance file')

        scale_parser = subparsers.add_parser('scale', parents=[common], help='Capacity scaling experiment')
        scale_parser.add_argument('network', help='Network file')
        scale_parser.add_argument('--n-max', type=int, default=3, help='Largest capacity multiplier')

        corpus_parser = subparsers.add_parser('corpus', parents=[common], help='Run the example corpus')
        corpus_parser.add_argument('--filter', help='Entry name glob or prefix')
        corpus_parser.add_argument('--workers', type=int, help='Thread pool size')

        bound_parser = subparsers.add_parser('bound', parents=[common], help='Lower bounds on the max flow')
        bound_parser.add_argument('network', help='Network file')
        bound_parser.add_argument('--loopfree', action='store_true',
                                  help='Also test the loop-free integral log-flow condition')
        bound_parser.add_argument('--reverse', default='', help='Comma-separated edge ids oriented b->a')
        bound_parser.add_argument('--base', type=int, default=2, help='Logarithm base for --loopfree')

        claim_parser = subparsers.add_parser('claim', parents=[common], help='Check a qudit chain claim')
        claim_parser.add_argument('--dims', type=int, nargs='+', required=True, help='Three or four qudit dims')
        claim_parser.add_argument('--ranks', type=int, nargs='+', required=True, help='One rank per link')

        family_parser = subparsers.add_parser('family', parents=[common], help='The 2n^2 - jk family')
        family_parser.add_argument('--n-max', type=int, default=4, help='Grid up to this n')
        family_parser.add_argument('--n', type=int, help='Single member n (with --j and --k)')
        family_parser.add_argument('--j', type=int, default=0)
        family_parser.add_argument('--k', type=int, default=0)

        ghz_parser = subparsers.add_parser('ghz', parents=[common], help='GHZ form of a 2x2x2 tensor')
        ghz_parser.add_argument('--tensor', nargs=8, metavar='Z',
                                help='Eight complex entries in C order, e.g. 1+2j or (-1+2j)')

        rk3_parser = subparsers.add_parser('rk3', parents=[common], help='Rank-3 symmetry check')
        rk3_parser.add_argument('--seeds', type=int, default=1000, help='Number of random D matrices')

        return parser

    def handle(self, args: Optional[Sequence[str]] = None) -> int:
        """
        Handle CLI command.

        Args:
            args: Command-line arguments (None = sys.argv)

        Returns:
            Exit code: 0 success, 1 computation or acceptance failure, 2 usage
        """
        try:
            parsed_args = self.parser.parse_args(args)
        except SystemExit as e:
            return EXIT_OK if not e.code else EXIT_USAGE

        if not parsed_args.command:
            self.parser.print_help(sys.stderr)
            return EXIT_USAGE

        if parsed_args.verbose:
            set_console_level("INFO")

        handler = getattr(self, f"handle_{parsed_args.command}")
        try:
            payload, header, rows, code = handler(parsed_args)
            self._emit(payload, parsed_args.format, header, rows)
            return code
        except KeyboardInterrupt:
            print("\nOperation cancelled", file=sys.stderr)
            return 130
        except (InputError, OSError, UnicodeDecodeError) as e:
            logger.error(f"Invalid input | Command: {parsed_args.command} | Error: {e}")
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except QMaxFlowError as e:
            log_error(parsed_args.command, e)
            print(f"error [{e.invariant}]: {e}", file=sys.stderr)
            return EXIT_FAILURE

    # -- output -------------------------------------------------------------------

    def _emit(self, payload: Dict[str, Any], fmt: str, header: Optional[Sequence[str]] = None,
              rows: Optional[List[Dict[str, Any]]] = None):
        out = self.stdout or sys.stdout
        if fmt == 'json':
            out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            return

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if rows is None:
            header = sorted(payload)
            rows = [payload]
        writer.writerow(header)
        for row in rows:
            writer.writerow([json.dumps(row[key]) if isinstance(row[key], (list, dict)) else row[key]
                             for key in header])
        out.write(buffer.getvalue())

    # -- helpers ----------------------------------------------------------------------

    def _load_network(self, path: str) -> Network:
        data = Path(path).read_bytes()
        net = parse_network(data, name=Path(path).stem)
        logger.info(f"Network loaded | Path: {path} | Vertices: {len(net.vertices)} | Edges: {len(net.edges)}")
        return net

    def _domain(self, args):
        name = args.domain or self.config.get("sampling", "domain") or "field"
        return domain_from_name(name, args.prime)

    # -- commands ---------------------------------------------------------------------

    def handle_qmc(self, args):
        net = self._load_network(args.network)
        cut = min_product_cut(net)
        payload = {"qmc": cut.value}
        if args.show_cut:
            payload["cut_edges"] = sorted(cut.edges)
            payload["source_side"] = sorted(cut.source_side)
        return payload, None, None, EXIT_OK

    def _handle_estimate(self, args, estimator):
        net = self._load_network(args.network)
        estimate = estimator(net, trials=args.trials, seed=args.seed, domain=self._domain(args),
                             rtol=args.rtol, stop_at_qmc=not args.all_trials, max_dim=args.max_dim)
        return estimate.to_dict(), None, None, EXIT_OK

    def handle_qmf(self, args):
        return self._handle_estimate(args, estimate_qmf)

    def handle_qmf2(self, args):
        return self._handle_estimate(args, estimate_qmf_v2)

    def handle_ee(self, args):
        """
        Handle ee command.

        Samples complex assignments for the best entropy, or evaluates the
        path-tensor assignment when --path-tensors is given. --rtol is the relative eigenvalue
        cutoff.
        """
        if args.domain == "field":
            raise ParameterError("ee works over complex numbers only")
        net = self._load_network(args.network)
        check_dimension(net, args.max_dim)
        if args.path_tensors:
            assign = construct_path_tensors(net, args.path_tensors, ComplexFloat())
            report = entanglement_entropy(net, assign, eigen_cutoff=args.rtol)
        else:
            report = estimate_mee(net, trials=args.trials, seed=args.seed, eigen_cutoff=args.rtol)
        return report.to_dict(), None, None, EXIT_OK

    def handle_qsat(self, args):
        inst = parse_qsat(Path(args.instance).read_text(encoding="utf-8"))
        domain = domain_from_name("field", args.prime)
        payload = {
            "gqsat": stable_kernel_dim(inst, seed=args.seed, domain=domain),
            "bound": kernel_dim_bound(inst),
            "total_dim": inst.total_dim,
        }
        return payload, None, None, EXIT_OK

    def handle_scale(self, args):
        net = self._load_network(args.network)
        rows = [row.to_dict() for row in scaling_experiment(
            net, args.n_max, trials=args.trials, seed=args.seed, domain=self._domain(args), max_dim=args.max_dim)]
        return {"network": net.label, "rows": rows}, SCALING_HEADER, rows, EXIT_OK

    def handle_corpus(self, args):
        """
        Handle corpus command.

        Exit code is 0 only when every selected row passes.
        """
        runner = CorpusRunner(build_corpus(trials=args.trials, seed=args.seed), workers=args.workers)
        rows = [row.to_dict() for row in runner.run(args.filter)]
        failures = [row for row in rows if not row["passed"]]
        for row in failures:
            print(f"FAIL {row['name']} {row['metric']}: expected {row['expected']}, "
                  f"observed {row['observed']} {row['error']}".rstrip(), file=sys.stderr)
        payload = {"rows": rows, "passed": not failures, "failures": len(failures)}
        return payload, CORPUS_HEADER, rows, EXIT_FAILURE if failures else EXIT_OK

    def handle_bound(self, args):
        net = self._load_network(args.network)
        payload = {
            "min_capacity_bound": min_capacity_bound(net),
            "lower_bound": qmf_lower_bound(net),
            "qmc": min_product_cut(net).value,
        }
        if args.loopfree:
            orientation = {eid: False for eid in _edge_ids(args.reverse)}
            report = has_loopfree_power_flow(net, orientation, d=args.base)
            payload["loopfree"] = {
                "holds": report.holds,
                "max_flow_matches_cut": report.max_flow_matches_cut,
                "integral": report.integral,
                "acyclic": report.acyclic,
                "flow_value": report.flow_value,
                "log_qmc": report.log_qmc,
            }
        return payload, None, None, EXIT_OK

    def handle_claim(self, args):
        dims, ranks = args.dims, args.ranks
        if len(dims) == 3 and len(ranks) == 2:
            report = check_claim_three_qudit(*dims, *ranks, trials=args.trials, seed=args.seed)
        elif len(dims) == 4 and len(ranks) == 3:
            report = check_claim_four_qudit(*dims, *ranks, trials=args.trials, seed=args.seed)
        else:
            raise ParameterError(f"need 3 dims with 2 ranks or 4 dims with 3 ranks, got {dims} / {ranks}")
        return report.to_dict(), None, None, EXIT_FAILURE if not report.holds else EXIT_OK

    def handle_family(self, args):
        domain = self._domain(args)
        if args.n is not None:
            reports = [qmf_family_2n2jk(args.n, args.j, args.k, trials=args.trials, seed=args.seed, domain=domain)]
        else:
            reports = qmf_family_grid(args.n_max, trials=args.trials, seed=args.seed, domain=domain)
        rows = [r.to_dict() for r in reports]
        return {"rows": rows}, FAMILY_HEADER, rows, EXIT_OK

    def handle_ghz(self, args):
        if args.tensor:
            try:
                t = np.array([complex(tok) for tok in args.tensor]).reshape(2, 2, 2)
            except ValueError:
                raise ParameterError(f"tensor entries must be complex numbers, got {args.tensor}") from None
        else:
            seed = args.seed if args.seed is not None else self.config.get("sampling", "seed")
            t = ComplexFloat().random(rng_for(seed, "ghz"), (2, 2, 2))
        decomposition = ghz_decompose(t)
        payload = {
            "a": _complex_pairs(decomposition.a),
            "b": _complex_pairs(decomposition.b),
            "c": _complex_pairs(decomposition.c),
            "eigenvalues": _complex_pairs(decomposition.eigenvalues),
            "relative_error": decomposition.relative_error(t),
        }
        return payload, None, None, EXIT_OK

    def handle_rk3(self, args):
        report = verify_rk3_symmetry(args.seeds, seed=args.seed, prime=args.prime)
        return report.to_dict(), None, None, EXIT_OK if report.passed else EXIT_FAILURE


def main():
    """CLI entry point."""
    handler = CLIHandler()
    sys.exit(handler.handle())


if __name__ == '__main__':
    main()
