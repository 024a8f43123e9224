from rtal.entities.experiment.schema import ExperimentConfig


def tiny_experiment() -> ExperimentConfig:
    return ExperimentConfig(
        name="tiny",
        seed=5,
        model={'num_layers': 2, 'd_model': 8, 'num_heads': 2, 'd_ff': 16, 'vocab_size': 8, 'max_len': 8,
               'dropout': 0.1},
        task={'kind': 'reverse', 'vocab_size': 8, 'min_len': 1, 'max_len': 4,
              'train_size': 64, 'valid_size': 8, 'test_size': 8},
        training={'steps': 8, 'warmup': 2, 'tokens_per_batch': 32, 'checkpoint_every': 2, 'log_every': 2,
                  'eval_size': 4})


def with_training(config: ExperimentConfig, **training) -> ExperimentConfig:
    return config.copy(update={'training': config.training.copy(update=training)})


def with_aggregation(config: ExperimentConfig, **aggregation) -> ExperimentConfig:
    model = config.model.copy(update={'aggregation': config.model.aggregation.copy(update=aggregation)})
    return config.copy(update={'model': model})
