from .training import (
    GanConfig, discriminator_loss, generate_adversarial, generator_forward,
    generator_loss, rmse, train_gan,
)

__all__ = [
    "GanConfig", "discriminator_loss", "generate_adversarial",
    "generator_forward", "generator_loss", "rmse", "train_gan",
]
