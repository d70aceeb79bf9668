"""Evolutionary search strategies over chromosomes in [0, 1]^G."""

import logging
from abc import ABC, abstractmethod
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Type

import numpy as np

from ..config import CalibrationConfig, OptimizerKind
from ..errors import ConfigError
from .chromosome import CalibrationProblem, Evaluation

logger = logging.getLogger(__name__)

GenerationCallback = Callable[[Dict[str, Any]], None]


@dataclass
class OptimizationOutcome:
    """Best chromosome found plus per-generation statistics."""

    best_genes: np.ndarray
    best_evaluation: Evaluation
    history: List[Dict[str, Any]] = field(default_factory=list)
    generations_run: int = 0


def _generation_record(generation: int, evaluations: List[Evaluation]) -> Dict[str, Any]:
    fitnesses = np.array([e.fitness for e in evaluations])
    best = evaluations[int(np.argmax(fitnesses))]
    return {
        'generation': generation,
        'best_fitness': float(fitnesses.max()),
        'mean_fitness': float(fitnesses.mean()),
        'best_loss': None if not np.isfinite(best.loss) else float(best.loss),
    }


class OptimizerBase(ABC):
    """Base class for calibration optimizers."""

    name: str = ""

    def __init__(self, config: CalibrationConfig):
        self.config = config

    @abstractmethod
    def evolve(
        self,
        problem: CalibrationProblem,
        rng: np.random.Generator,
        population: np.ndarray,
        evaluations: List[Evaluation],
        pool: Optional[Executor],
    ) -> tuple[np.ndarray, List[Evaluation]]:
        """Produce and score the next generation."""

    def run(
        self,
        problem: CalibrationProblem,
        seed: int,
        pool: Optional[Executor] = None,
        on_generation: Optional[GenerationCallback] = None,
        initial: Optional[np.ndarray] = None,
    ) -> OptimizationOutcome:
        """Evolve a population for ``config.generations`` generations.

        Generation 0 is the scored initial population. Each later generation
        is produced from the previous one after all its members are scored,
        so the result does not depend on evaluation order.
        """
        cfg = self.config
        rng = np.random.default_rng(seed)
        genes = problem.gene_count

        if initial is None:
            population = rng.random((cfg.population, genes))
        else:
            population = np.clip(np.asarray(initial, dtype=float), 0.0, 1.0)
            if population.ndim != 2 or population.shape[1] != genes or population.shape[0] < 4:
                raise ConfigError(
                    f"initial population must be at least 4 x {genes}, got {population.shape}"
                )
        evaluations = problem.evaluate_many(population, pool)

        history: List[Dict[str, Any]] = []
        best_genes, best_eval = self._best_of(population, evaluations)

        def record(generation: int) -> None:
            entry = _generation_record(generation, evaluations)
            history.append(entry)
            if on_generation is not None:
                on_generation(entry)

        record(0)
        generation = 0
        while generation < cfg.generations and not best_eval.loss < cfg.target_loss:
            generation += 1
            population, evaluations = self.evolve(problem, rng, population, evaluations, pool)
            genes_now, eval_now = self._best_of(population, evaluations)
            if eval_now.fitness > best_eval.fitness:
                best_genes, best_eval = genes_now, eval_now
            record(generation)

        logger.info(
            "%s finished after %d generations: best loss %s",
            self.name, generation, f"{best_eval.loss:.6f}" if np.isfinite(best_eval.loss) else "inf",
        )
        return OptimizationOutcome(
            best_genes=best_genes.copy(),
            best_evaluation=best_eval,
            history=history,
            generations_run=generation,
        )

    @staticmethod
    def _best_of(population: np.ndarray, evaluations: List[Evaluation]) -> tuple[np.ndarray, Evaluation]:
        # argmax returns the first maximum, so ties resolve to the lowest index.
        index = int(np.argmax([e.fitness for e in evaluations]))
        return population[index], evaluations[index]


class GeneticOptimizer(OptimizerBase):
    """Tournament selection, uniform crossover, Gaussian mutation and elitism."""

    name = OptimizerKind.GA.value

    def _tournament(self, rng: np.random.Generator, fitnesses: np.ndarray) -> int:
        size = min(self.config.tournament_size, fitnesses.size)
        contenders = rng.choice(fitnesses.size, size=size, replace=False)
        return int(contenders[np.argmax(fitnesses[contenders])])

    def _mutate(self, rng: np.random.Generator, child: np.ndarray) -> np.ndarray:
        rate = self.config.mutation_rate
        if rate is None:
            rate = 1.0 / child.size
        mask = rng.random(child.size) < rate
        noise = rng.normal(0.0, self.config.mutation_sigma, child.size)
        return np.clip(child + mask * noise, 0.0, 1.0)

    def evolve(self, problem, rng, population, evaluations, pool):
        cfg = self.config
        size = population.shape[0]
        fitnesses = np.array([e.fitness for e in evaluations])

        order = np.argsort(-fitnesses, kind='stable')
        elites = [population[i].copy() for i in order[:cfg.elitism]]

        children: List[np.ndarray] = []
        while len(children) < size - len(elites):
            first = population[self._tournament(rng, fitnesses)]
            second = population[self._tournament(rng, fitnesses)]
            if rng.random() < cfg.crossover_rate:
                swap = rng.random(first.size) < 0.5
                pair = (np.where(swap, second, first), np.where(swap, first, second))
            else:
                pair = (first.copy(), second.copy())
            for child in pair:
                children.append(self._mutate(rng, child))

        next_population = np.vstack(elites + children[:size - len(elites)])
        return next_population, problem.evaluate_many(next_population, pool)


class DifferentialEvolutionOptimizer(OptimizerBase):
    """DE/rand/1/bin with bound handling by clipping and greedy replacement."""

    name = OptimizerKind.DE.value

    def evolve(self, problem, rng, population, evaluations, pool):
        cfg = self.config
        size, genes = population.shape
        if size < 4:
            raise ConfigError(f"differential evolution needs at least 4 members, got {size}")

        trials = np.empty_like(population)
        for i in range(size):
            others = np.delete(np.arange(size), i)
            r1, r2, r3 = rng.choice(others, size=3, replace=False)
            mutant = np.clip(
                population[r1] + cfg.de_weight * (population[r2] - population[r3]), 0.0, 1.0
            )
            cross = rng.random(genes) < cfg.de_crossover
            cross[rng.integers(genes)] = True
            trials[i] = np.where(cross, mutant, population[i])

        trial_evaluations = problem.evaluate_many(trials, pool)
        next_population = population.copy()
        next_evaluations = list(evaluations)
        for i, trial_eval in enumerate(trial_evaluations):
            if trial_eval.fitness >= evaluations[i].fitness:
                next_population[i] = trials[i]
                next_evaluations[i] = trial_eval
        return next_population, next_evaluations


OPTIMIZERS: Dict[str, Type[OptimizerBase]] = {
    GeneticOptimizer.name: GeneticOptimizer,
    DifferentialEvolutionOptimizer.name: DifferentialEvolutionOptimizer,
}


def get_optimizer(config: CalibrationConfig) -> OptimizerBase:
    """Instantiate the optimizer selected by ``config.optimizer``."""
    kind = OptimizerKind(config.optimizer).value
    try:
        return OPTIMIZERS[kind](config)
    except KeyError:
        raise ConfigError(f"Unknown optimizer {kind!r}") from None
