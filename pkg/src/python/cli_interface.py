#!/usr/bin/env python3
"""Interface de linha de comando do sistema de spotting de palavras.

Este módulo expõe os comandos do pipeline (WordSpottingPipeline) como
subcomandos argparse:

    synth               gera um corpus sintético (PGM + manifest.tsv)
    train               treina o modelo inicial no corpus rotulado
    adapt               adapta o modelo ao corpus alvo sem anotações
    spot                ranqueia a galeria para uma consulta (qbe | qbs)
    recognize           reconhece cada imagem alvo pelo léxico
    eval                avalia mAP (qbe, qbs ou ambos)
    confidence-report   pontua as imagens alvo com medidas de confiança

Flags globais (em qualquer subcomando): --config, --seed, --out, --log-dir e
--verbose. `--seed` sobrepõe a semente do arquivo de configuração; os padrões
de --config e --log-dir podem vir de WORDSPOT_CONFIG e WORDSPOT_LOG_DIR (.env).

Códigos de saída:
    0   sucesso
    1   erro de uso ou de configuração
    2   erro em tempo de execução (entrada inválida, E/S, formato de modelo)

A saída de `spot` (lista ranqueada TSV) vai para o stdout; logs e o resumo
Rich vão para o stderr.

Exemplo de uso:
    $ python src/python/cli_interface.py train --config inputs/config/desk_config.json --seed 7

    ou via script auxiliar:

    $ ./run_cli.sh eval --config inputs/config/desk_config.json --protocol both

Attributes:
    ROOT_DIR (Path): Diretório raiz do projeto
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

ROOT_DIR = Path(__file__).parent.parent.parent
sys.path.insert(0, str(ROOT_DIR))

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.python.confidence.measures import MEASURES
from src.python.main import WordSpottingPipeline, load_environment
from src.python.spotting.evaluation import PROTOCOLS
from src.python.utils.config_loader import load_config
from src.python.utils.errors import ConfigError, WordSpotError
from src.python.utils.logger import PipelineLogger

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

CONFIDENCE_CHOICES = [m.replace('_', '-') for m in MEASURES]


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser que sinaliza erros de uso com ConfigError em vez de sys.exit(2)"""

    def error(self, message: str) -> None:
        raise ConfigError(f"{self.prog}: {message}")


def _measure_list(value: str) -> List[str]:
    measures = [m.strip().replace('-', '_') for m in value.split(',') if m.strip()]
    unknown = [m for m in measures if m not in MEASURES]
    if not measures or unknown:
        raise argparse.ArgumentTypeError(
            f"invalid measures '{value}', expected a comma-separated subset of {CONFIDENCE_CHOICES}"
        )
    return measures


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{value}'")
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {number}")
    return number


def build_parser() -> argparse.ArgumentParser:
    """Parser com os sete subcomandos e as flags globais"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='JSON configuration file (default: $WORDSPOT_CONFIG)')
    common.add_argument('--seed', type=int, help='64-bit run seed, overrides the configuration')
    common.add_argument('--out', type=Path, help='output directory, overrides paths.output_dir')
    common.add_argument('--log-dir', type=Path, help='directory for the DEBUG log file (default: $WORDSPOT_LOG_DIR)')
    common.add_argument('--verbose', action='store_true', help='DEBUG messages on the console')

    parser = CliArgumentParser(
        prog='wordspot',
        description='Annotation-free word spotting: synthesis, training, adaptation and retrieval',
    )
    commands = parser.add_subparsers(dest='command', metavar='command', parser_class=CliArgumentParser)
    commands.required = True

    synth = commands.add_parser('synth', parents=[common], help='render a synthetic word corpus')
    synth.add_argument('--style', help='style family id (default: synth.style)')
    synth.add_argument('--per-word', type=_positive_int, help='images per word (default: synth.per_word)')

    train = commands.add_parser('train', parents=[common], help='train the initial model on paths.train_corpus')
    train.add_argument('--resume-from', type=Path, help='continue training from a saved model')

    adapt = commands.add_parser('adapt', parents=[common], help='self-train on the unlabeled paths.target_corpus')
    adapt.add_argument('--confidence', choices=CONFIDENCE_CHOICES + ['mc_dropout'],
                       help='confidence measure (default: adapt.measure)')
    adapt.add_argument('--closed-lexicon', action='store_true',
                       help='use the target transcriptions as lexicon')

    spot = commands.add_parser('spot', parents=[common], help='rank the gallery for one query (TSV on stdout)')
    spot.add_argument('--query', required=True, help='query string (qbs) or PGM image path (qbe)')
    spot.add_argument('--mode', choices=list(PROTOCOLS), default='qbs')
    spot.add_argument('--top-k', type=_positive_int, help='number of listed items (default: whole gallery)')
    spot.add_argument('--oracle-gallery', action='store_true',
                      help='use the PHOCs of the gallery transcriptions instead of model estimates')

    recognize = commands.add_parser('recognize', parents=[common], help='lexicon recognition of paths.target_corpus')
    recognize.add_argument('--closed-lexicon', action='store_true',
                           help='use the target transcriptions as lexicon')

    evaluate = commands.add_parser('eval', parents=[common], help='mAP evaluation on paths.eval_corpus')
    evaluate.add_argument('--protocol', choices=list(PROTOCOLS) + ['both'], default='both')
    evaluate.add_argument('--stopwords', type=Path, help='word list excluded as queries (kept as distractors)')

    report = commands.add_parser('confidence-report', parents=[common],
                                 help='per-image confidence scores of paths.target_corpus')
    report.add_argument('--measures', type=_measure_list,
                        help=f"comma-separated measures from {CONFIDENCE_CHOICES} (default: adapt.measure)")

    return parser


def _run_command(pipeline: WordSpottingPipeline, args: argparse.Namespace) -> None:
    if args.command == 'synth':
        pipeline.cmd_synth(args.style, args.per_word)
    elif args.command == 'train':
        pipeline.cmd_train(args.resume_from)
    elif args.command == 'adapt':
        pipeline.cmd_adapt(args.confidence, args.closed_lexicon)
    elif args.command == 'spot':
        pipeline.cmd_spot(args.query, args.mode, args.top_k, args.oracle_gallery)
    elif args.command == 'recognize':
        pipeline.cmd_recognize(args.closed_lexicon)
    elif args.command == 'eval':
        pipeline.cmd_eval(args.protocol, args.stopwords)
    elif args.command == 'confidence-report':
        pipeline.cmd_confidence_report(args.measures)


def print_summary(console: Console, command: str, stats: Dict) -> None:
    """Tabela Rich com as estatísticas da execução"""
    table = Table(title=f"wordspot {command}", show_header=True, header_style="bold cyan")
    table.add_column("Item", style="cyan")
    table.add_column("Valor", justify="right")

    for key, value in stats.items():
        if key == 'map' and isinstance(value, dict):
            for protocol, score in sorted(value.items()):
                table.add_row(f"{protocol.upper()} mAP", f"{score:.4f}")
        elif isinstance(value, float):
            table.add_row(key, f"{value:.4f}")
        else:
            table.add_row(key, str(value))

    console.print(table)


def run(argv: Optional[List[str]] = None, console: Optional[Console] = None) -> int:
    """Executa um subcomando e retorna o código de saída.

    Args:
        argv: Argumentos (padrão: sys.argv[1:])
        console: Console Rich para mensagens (padrão: stderr)

    Returns:
        0 em sucesso, 1 em erro de uso/configuração, 2 em erro de execução
    """
    console = console or Console(stderr=True)
    env = load_environment()
    logger: Optional[PipelineLogger] = None

    try:
        args = build_parser().parse_args(argv)
        config = load_config(args.config or env['config'], seed=args.seed, output_dir=args.out)
        logger = PipelineLogger(log_dir=args.log_dir or env['log_dir'], verbose=args.verbose)
        logger.debug(f"command={args.command} seed={config.seed} output_dir={config.paths.output_dir}")

        pipeline = WordSpottingPipeline(config, logger=logger)
        _run_command(pipeline, args)
        print_summary(console, args.command, pipeline.stats)
        return EXIT_OK

    except ConfigError as exc:
        console.print(Panel(f"[red]✗ {exc}[/red]", title="configuration error", border_style="red"))
        if logger:
            logger.debug("configuration error", exc_info=True)
        return EXIT_USAGE
    except (WordSpotError, OSError, ValueError) as exc:
        console.print(Panel(f"[red]✗ {type(exc).__name__}: {exc}[/red]", title="error", border_style="red"))
        if logger:
            logger.debug("runtime error", exc_info=True)
        return EXIT_RUNTIME


def main() -> None:
    """Ponto de entrada da CLI"""
    sys.exit(run())


if __name__ == '__main__':
    main()
