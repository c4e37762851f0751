"""Pipeline principal de spotting de palavras sem anotações.

Este módulo orquestra os comandos do sistema sobre uma configuração validada
(RunConfig):

1. synth: geração de um corpus sintético (imagens PGM + manifest.tsv)
2. train: treinamento do estimador inicial de atributos PHOC
3. adapt: adaptação por auto-treinamento com pseudo-rótulos do léxico
4. spot: ranqueamento de uma galeria por consulta (QbE ou QbS)
5. recognize: reconhecimento por vizinho mais próximo no léxico
6. eval: avaliação mAP nos protocolos QbE e QbS
7. confidence_report: pontuação de confiança de cada imagem alvo

Todos os caminhos e a configuração são validados antes de qualquer escrita em
disco. Toda aleatoriedade deriva da semente da configuração (ver utils/rng.py).

Exemplo de uso:
    >>> config = load_config('inputs/config/desk_config.json', seed=7)
    >>> pipeline = WordSpottingPipeline(config)
    >>> pipeline.cmd_train()

Ou via linha de comando:
    $ python src/python/cli_interface.py train --config inputs/config/desk_config.json

Attributes:
    project_root (Path): Diretório raiz do projeto
"""

import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv

project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from src.python.confidence.measures import MEASURES, score_batch
from src.python.corpus.manifest import MANIFEST_NAME, Manifest, load_word_images
from src.python.corpus.word_image import normalize, read_image
from src.python.estimator.model import EstimatorModel, init_model, predict_batch
from src.python.estimator.model_io import MODEL_SUFFIX, load_model, save_model
from src.python.estimator.trainer import train
from src.python.adapt.self_training import DiagnosticSet, adapt
from src.python.phoc.phoc_builder import PhocConfig, canonicalize, phoc_matrix, phoc_of_string
from src.python.reporters.run_log import RunLog
from src.python.reporters.tsv_reporter import TsvReporter
from src.python.spotting.evaluation import PROTOCOLS, EvaluationResult, evaluate_attributes
from src.python.spotting.lexicon import Lexicon, build_closed_lexicon, load_lexicon, oov_rate, read_word_list
from src.python.spotting.retrieval import RankedList, rank_vectors, recognize_batch
from src.python.synth.renderer import generate_corpus
from src.python.utils.config_loader import RunConfig
from src.python.utils.errors import ConfigError
from src.python.utils.file_manager import FileManager
from src.python.utils.logger import PipelineLogger
from src.python.utils.rng import SeedStreams

ENV_CONFIG = 'WORDSPOT_CONFIG'
ENV_LOG_DIR = 'WORDSPOT_LOG_DIR'

MODEL_NAME = f"model{MODEL_SUFFIX}"
ADAPTED_NAME = f"adapted{MODEL_SUFFIX}"
RUN_LOG_NAME = 'run_log.jsonl'


def load_environment() -> Dict[str, Optional[str]]:
    """Carrega o .env da raiz do projeto e retorna os padrões de --config e do diretório de logs."""
    load_dotenv(project_root / '.env')
    return {
        'config': os.getenv(ENV_CONFIG),
        'log_dir': os.getenv(ENV_LOG_DIR),
    }


class WordSpottingPipeline:
    """Orquestrador dos comandos de geração, treino, adaptação e spotting.

    Cada comando lê apenas a configuração validada, valida os caminhos de que
    precisa e só então cria o diretório de saída e escreve artefatos.

    Attributes:
        config (RunConfig): Configuração validada da execução
        logger (PipelineLogger): Sistema de logging centralizado
        streams (SeedStreams): Subfluxos aleatórios nomeados da semente
        file_manager (FileManager): Gerenciador do diretório de saída
        reporter (TsvReporter): Exportador dos relatórios TSV
        phoc_config (PhocConfig): Configuração PHOC da execução
        stats (Dict): Contadores da execução para o resumo final
    """

    def __init__(self, config: RunConfig, logger: Optional[PipelineLogger] = None) -> None:
        """Inicializa o pipeline com uma configuração já validada.

        Args:
            config: Configuração da execução (semente obrigatória)
            logger: Logger opcional; um PipelineLogger sem arquivo é criado se ausente
        """
        self.config = config
        self.logger = logger or PipelineLogger()
        self.streams = SeedStreams(config.seed)
        self.output_dir = Path(config.paths.output_dir)
        self.file_manager = FileManager(self.output_dir)
        self.reporter = TsvReporter(self.output_dir, create=False)
        self.phoc_config: PhocConfig = config.phoc.to_config()

        self.stats: Dict[str, Any] = {}

    # --- helpers -------------------------------------------------------------

    def _prepare_output(self) -> Path:
        """Cria o diretório de saída (chamado só depois de toda validação)"""
        return self.file_manager.ensure_output_directory(self.output_dir)

    def _load_manifest(self, field: str, labeled: bool = False) -> Manifest:
        self.config.require(f"paths.{field}")
        manifest = Manifest.load(getattr(self.config.paths, field))
        if labeled and not manifest.has_transcriptions:
            raise ConfigError(f"paths.{field}: {manifest.root} has no transcriptions")
        return manifest

    def _load_model(self, path: Optional[Path] = None) -> EstimatorModel:
        if path is None:
            self.config.require('paths.model')
            path = self.config.paths.model
        elif not Path(path).exists():
            raise ConfigError(f"model not found: {path}")
        model = load_model(path)
        if model.phoc_config_hash != self.phoc_config.config_hash:
            raise ConfigError(
                f"model {path} was trained for PHOC config {model.phoc_config_hash}, "
                f"configuration gives {self.phoc_config.config_hash}"
            )
        self.logger.info(f"  → Model: {path} ({model.num_parameters} parameters)")
        return model

    def _lexicon(self, closed_from: Optional[Manifest] = None) -> Lexicon:
        """Léxico configurado, ou o léxico fechado das transcrições de `closed_from`"""
        if closed_from is not None:
            lexicon = build_closed_lexicon(closed_from.transcriptions(), self.phoc_config)
            self.logger.info(f"  → Closed lexicon: {len(lexicon)} words")
            return lexicon
        self.config.require('paths.lexicon')
        lexicon = load_lexicon(self.config.paths.lexicon, self.phoc_config)
        self.logger.info(f"  → Lexicon: {len(lexicon)} words from {self.config.paths.lexicon}")
        return lexicon

    def _stopwords(self, stopword_file: Optional[Path] = None) -> Tuple[str, ...]:
        words = list(self.config.evaluation.stopwords)
        for path in (self.config.evaluation.stopword_file, stopword_file):
            if path is None:
                continue
            if not Path(path).exists():
                raise ConfigError(f"stopword file not found: {path}")
            words.extend(read_word_list(path))
        return tuple(words)

    def _log_oov(self, lexicon: Lexicon, manifest: Manifest) -> None:
        if manifest.has_transcriptions:
            rate = oov_rate(lexicon, manifest.transcriptions())
            self.stats['oov_rate'] = rate
            self.logger.info(f"  → OOV rate of {manifest.root}: {rate:.3f}")

    # --- commands ------------------------------------------------------------

    def cmd_synth(self, style_id: Optional[str] = None, per_word: Optional[int] = None) -> Manifest:
        """Gera um corpus sintético no diretório de saída.

        Args:
            style_id: Família de estilo (padrão: synth.style)
            per_word: Imagens por palavra (padrão: synth.per_word)

        Returns:
            Manifest do corpus gerado
        """
        self.logger.section("Synthetic corpus generation")
        synth = self.config.synth

        self.logger.step(1, "Validating word list and style")
        style = synth.resolve_style(style_id)
        per_word = per_word if per_word is not None else synth.per_word
        if per_word < 1:
            raise ConfigError(f"synth.per_word must be >= 1, got {per_word}")
        words = list(synth.words)
        if synth.wordlist is not None:
            self.config.require('synth.wordlist')
            words.extend(read_word_list(synth.wordlist))
        if not words:
            raise ConfigError("synth.words: no words configured (set synth.words or synth.wordlist)")
        for word in words:
            canonicalize(word, self.phoc_config.alphabet)

        self.logger.step(2, f"Rendering {len(words)} words x {per_word} in style '{style.id}'")
        out_dir = self._prepare_output()
        manifest = generate_corpus(
            words, per_word, style, synth.scale_jitter, out_dir,
            self.streams.generator('synth'), self.phoc_config.alphabet, logger=self.logger,
        )
        self.stats.update(images=len(manifest), manifest=str(out_dir / MANIFEST_NAME))
        self.logger.section("Synthesis completed")
        return manifest

    def cmd_train(self, resume_from: Optional[Path] = None) -> Path:
        """Treina o modelo inicial no corpus rotulado paths.train_corpus.

        Args:
            resume_from: Modelo salvo a partir do qual o treino continua

        Returns:
            Caminho do modelo salvo
        """
        self.logger.section("Initial model training")
        settings = self.config.estimator

        self.logger.step(1, "Loading training corpus")
        manifest = self._load_manifest('train_corpus', labeled=True)
        if resume_from is not None:
            model = self._load_model(resume_from)
        else:
            model = init_model(
                settings.layers(self.phoc_config.dim),
                self.streams.integer('init'),
                self.phoc_config,
                settings.input_shape,
                settings.dropout_p,
            )
        schedule = self.config.training.schedule(self.streams.integer('train'), self.streams.integer('dropout'))
        images = load_word_images(manifest, *model.input_shape)
        targets = phoc_matrix(manifest.transcriptions(), self.phoc_config, dtype=np.float32)
        self.logger.info(f"  → {len(images)} images, PHOC dimension {self.phoc_config.dim}")

        self.logger.step(2, "Training")
        trained, losses = train(model, list(zip(images, targets)), schedule, logger=self.logger)

        self.logger.step(3, "Saving model and loss trace")
        out_dir = self._prepare_output()
        model_path = save_model(trained, out_dir / MODEL_NAME)
        self.reporter.export_loss_trace(losses, 'loss_trace')
        self.stats.update(iterations=len(losses), final_loss=losses[-1] if losses else None,
                          model=str(model_path), sha256=self.file_manager.calculate_file_hash(model_path))
        self.logger.info(f"  ✓ Model saved: {model_path}")
        self.logger.section("Training completed")
        return model_path

    def cmd_adapt(self, measure: Optional[str] = None, closed_lexicon: bool = False) -> Path:
        """Adapta o modelo ao corpus alvo sem rótulos.

        Salva um checkpoint `cycle_<k>.wsaf` e um registro no run log a cada ciclo.

        Args:
            measure: Medida de confiança (sobrepõe adapt.measure)
            closed_lexicon: Usa as transcrições do corpus alvo como léxico

        Returns:
            Caminho do modelo adaptado
        """
        self.logger.section("Annotation-free adaptation")

        self.logger.step(1, "Validating inputs")
        schedule = self.config.adapt.schedule(self.streams.integer('adapt'), self.config.training, measure)
        target = self._load_manifest('target_corpus', labeled=closed_lexicon or schedule.measure == 'oracle')
        model = self._load_model()
        lexicon = self._lexicon(target if closed_lexicon else None)
        self._log_oov(lexicon, target)

        unlabeled = load_word_images(target, *model.input_shape)
        diagnostics = DiagnosticSet(
            unlabeled_transcriptions=target.transcriptions() if target.has_transcriptions else None,
            protocols=tuple(self.config.evaluation.protocols),
            stopwords=self._stopwords(),
        )
        if self.config.paths.eval_corpus is not None:
            evaluation = self._load_manifest('eval_corpus', labeled=True)
            diagnostics.eval_images = load_word_images(evaluation, *model.input_shape)
            diagnostics.eval_transcriptions = evaluation.transcriptions()
        oracle_labels = target.transcriptions() if schedule.measure == 'oracle' else None

        self.logger.step(2, f"Running {schedule.cycles} cycles, measure '{schedule.measure}'")
        out_dir = self._prepare_output()
        checkpoints = self.file_manager.ensure_output_directory(out_dir / 'checkpoints')
        run_log = RunLog(out_dir / RUN_LOG_NAME)

        def on_cycle_end(current: EstimatorModel, report) -> None:
            save_model(current, checkpoints / f"cycle_{report.cycle}{MODEL_SUFFIX}")
            record = report.to_record()
            record['measure'] = schedule.measure
            run_log.append(record)

        adapted, reports = adapt(
            model, unlabeled, lexicon, schedule,
            diagnostics=diagnostics, oracle_labels=oracle_labels,
            on_cycle_end=on_cycle_end, logger=self.logger,
        )

        self.logger.step(3, "Saving adapted model")
        adapted_path = save_model(adapted, out_dir / ADAPTED_NAME)
        self.stats.update(cycles=len(reports), model=str(adapted_path), run_log=str(run_log.path),
                          sha256=self.file_manager.calculate_file_hash(adapted_path))
        for name, digest in self.file_manager.hash_tree(checkpoints, MODEL_SUFFIX).items():
            self.logger.debug(f"  checkpoint {name} sha256={digest}")
        if reports and reports[-1].map_scores:
            self.stats['map'] = dict(reports[-1].map_scores)
        self.logger.section("Adaptation completed")
        return adapted_path

    def cmd_spot(
        self,
        query: str,
        mode: str,
        top_k: Optional[int] = None,
        oracle_gallery: bool = False,
        stream=None
    ) -> RankedList:
        """Ranqueia a galeria (paths.target_corpus) e escreve a lista TSV no stdout.

        Args:
            query: Palavra (qbs) ou caminho de imagem PGM (qbe)
            mode: 'qbe' ou 'qbs'
            top_k: Número de itens listados (padrão: a galeria inteira)
            oracle_gallery: Usa os PHOCs das transcrições como vetores da galeria

        Returns:
            RankedList completa
        """
        if mode not in PROTOCOLS:
            raise ConfigError(f"unknown spotting mode '{mode}', expected one of {list(PROTOCOLS)}")
        if top_k is not None and top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {top_k}")

        gallery_manifest = self._load_manifest('target_corpus', labeled=oracle_gallery)
        model = self._load_model() if (mode == 'qbe' or not oracle_gallery) else None

        if mode == 'qbe':
            image = read_image(query)
            query_vector = predict_batch(model, [normalize(image, *model.input_shape, invert=True)])[0]
        else:
            query_vector = phoc_of_string(query, self.phoc_config).bits

        if oracle_gallery:
            gallery = phoc_matrix(gallery_manifest.transcriptions(), self.phoc_config)
        else:
            gallery = predict_batch(model, load_word_images(gallery_manifest, *model.input_shape))

        ranked = rank_vectors(query_vector, gallery, query_id=query)
        paths = [entry.image_path for entry in gallery_manifest.entries]
        self.reporter.print_ranked(ranked, paths, top_k, stream=stream)
        self.stats.update(gallery=len(paths), listed=min(len(paths), top_k or len(paths)))
        return ranked

    def cmd_recognize(self, closed_lexicon: bool = False) -> Path:
        """Reconhece cada imagem de paths.target_corpus pelo léxico.

        Returns:
            Caminho de recognition.tsv (path, label, dissimilarity, lexicon_index)
        """
        self.logger.section("Lexicon-based recognition")
        target = self._load_manifest('target_corpus', labeled=closed_lexicon)
        model = self._load_model()
        lexicon = self._lexicon(target if closed_lexicon else None)
        self._log_oov(lexicon, target)

        attributes = predict_batch(model, load_word_images(target, *model.input_shape))
        results = recognize_batch(attributes, lexicon)
        rows = [
            {
                'path': entry.image_path,
                'label': result.label,
                'dissimilarity': result.dissimilarity,
                'lexicon_index': result.lexicon_index,
            }
            for entry, result in zip(target.entries, results)
        ]

        self._prepare_output()
        path = self.reporter.export_recognition(rows)
        if target.has_transcriptions:
            alphabet = self.phoc_config.alphabet
            correct = sum(
                1 for entry, result in zip(target.entries, results)
                if canonicalize(entry.transcription, alphabet) == result.label
            )
            self.stats['accuracy'] = correct / len(results)
            self.logger.info(f"  → Word accuracy: {self.stats['accuracy']:.4f}")
        self.stats.update(images=len(rows), report=str(path))
        return path

    def cmd_eval(self, protocol: str = 'both', stopword_file: Optional[Path] = None) -> Dict[str, EvaluationResult]:
        """Avalia o modelo em paths.eval_corpus e escreve eval_<protocolo>.tsv.

        Args:
            protocol: 'qbe', 'qbs' ou 'both'
            stopword_file: Lista extra de stopwords (excluídas como consulta)

        Returns:
            Resultado por protocolo
        """
        self.logger.section("mAP evaluation")
        if protocol == 'both':
            protocols: Sequence[str] = PROTOCOLS
        elif protocol in PROTOCOLS:
            protocols = (protocol,)
        else:
            raise ConfigError(f"unknown protocol '{protocol}', expected qbe, qbs or both")

        manifest = self._load_manifest('eval_corpus')
        transcriptions = manifest.transcriptions()
        stopwords = self._stopwords(stopword_file)
        model = self._load_model()

        attributes = predict_batch(model, load_word_images(manifest, *model.input_shape))
        results = {
            name: evaluate_attributes(
                name, transcriptions, attributes, self.phoc_config,
                exclude_self=self.config.evaluation.exclude_self, stopwords=stopwords,
            )
            for name in protocols
        }

        self._prepare_output()
        for name, result in results.items():
            path = self.reporter.export_evaluation(result, f"eval_{name}")
            self.logger.info(f"  ✓ {name.upper()} mAP {result.mean_ap:.4f} "
                             f"({len(result.queries)} queries, {result.skipped} skipped) → {path}")
        self.stats['map'] = {name: result.mean_ap for name, result in results.items()}
        return results

    def cmd_confidence_report(self, measures: Optional[Sequence[str]] = None) -> Path:
        """Pontua cada imagem de paths.target_corpus com uma ou mais medidas.

        Com léxico disponível, cada linha traz o pseudo-rótulo; com transcrições,
        também a coluna `correct`.

        Args:
            measures: Medidas de confiança (padrão: adapt.measure)

        Returns:
            Caminho de confidence_report.tsv
        """
        self.logger.section("Confidence report")
        measures = [m.replace('-', '_') for m in (measures or [self.config.adapt.measure])]
        for measure in measures:
            if measure not in MEASURES:
                raise ConfigError(f"unknown confidence measure '{measure}', expected one of {list(MEASURES)}")

        target = self._load_manifest('target_corpus', labeled='oracle' in measures)
        model = self._load_model()
        lexicon = self._lexicon() if self.config.paths.lexicon is not None else None
        images = load_word_images(target, *model.input_shape)
        attributes = predict_batch(model, images).astype(np.float64)

        labels: Optional[List[str]] = None
        correct: Optional[List[bool]] = None
        if lexicon is not None:
            labels = [result.label for result in recognize_batch(attributes, lexicon)]
            if target.has_transcriptions:
                alphabet = self.phoc_config.alphabet
                correct = [
                    canonicalize(entry.transcription, alphabet) == label
                    for entry, label in zip(target.entries, labels)
                ]

        truths = None
        if 'oracle' in measures:
            truths = [phoc_of_string(t, self.phoc_config) for t in target.transcriptions()]

        rows = []
        for position, measure in enumerate(measures):
            scores = score_batch(
                measure, model, images, attributes,
                rng=self.streams.generator('confidence', position),
                passes=self.config.adapt.mc_passes, truths=truths,
            )
            for index, (entry, score) in enumerate(zip(target.entries, scores)):
                row = {'id': index, 'path': entry.image_path, 'measure': measure, 'score': score.value}
                if labels is not None:
                    row['pseudo_label'] = labels[index]
                if correct is not None:
                    row['correct'] = int(correct[index])
                rows.append(row)

        self._prepare_output()
        path = self.reporter.export_confidence(rows)
        self.stats.update(images=len(images), measures=list(measures), report=str(path))
        self.logger.info(f"  ✓ {len(rows)} rows → {path}")
        return path
