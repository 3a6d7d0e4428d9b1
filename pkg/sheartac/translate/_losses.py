import torch


def generator_loss(generated, real, scores_fake, reconstruction_weight=100.0,
                   adversarial_weight=1.0):
    """Pixel reconstruction plus least-squares adversarial loss.

    Parameters
    ----------
    generated : tensor
        Generated images.

    real : tensor, same shape as generated
        Target images.

    scores_fake : tensor
        Discriminator scores of the generated images.

    reconstruction_weight : float, optional (default: 100)
        Weight of the mean absolute pixel error.

    adversarial_weight : float, optional (default: 1)
        Weight of the adversarial term.

    Returns
    -------
    loss : tensor, shape ()
        Generator loss.
    """
    reconstruction = torch.mean(torch.abs(generated - real))
    adversarial = torch.mean((scores_fake - 1.0) ** 2)
    return reconstruction_weight * reconstruction \
        + adversarial_weight * adversarial


def discriminator_loss(scores_real, scores_fake):
    """Least-squares discriminator loss.

    Parameters
    ----------
    scores_real : tensor
        Scores of real pairs.

    scores_fake : tensor
        Scores of generated pairs.

    Returns
    -------
    loss : tensor, shape ()
        Discriminator loss.
    """
    return 0.5 * torch.mean((scores_real - 1.0) ** 2) \
        + 0.5 * torch.mean(scores_fake ** 2)


def translator_loss(generated, real, disc_scores, config):
    """Losses of generator and discriminator.

    Parameters
    ----------
    generated : tensor
        Generated images.

    real : tensor, same shape as generated
        Target images.

    disc_scores : tuple
        Discriminator scores (scores_real, scores_fake).

    config : TranslatorConfig
        Contains the loss weights.

    Returns
    -------
    generator_loss : tensor, shape ()
        Loss of the generator.

    discriminator_loss : tensor, shape ()
        Loss of the discriminator.
    """
    if generated.shape != real.shape:
        raise ValueError("Generated and real images differ in shape: %s, %s"
                         % (tuple(generated.shape), tuple(real.shape)))
    scores_real, scores_fake = disc_scores
    return (generator_loss(generated, real, scores_fake,
                           config.reconstruction_weight,
                           config.adversarial_weight),
            discriminator_loss(scores_real, scores_fake))
