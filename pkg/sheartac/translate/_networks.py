import torch
from torch import nn

from ..errors import ConfigurationError


def init_weights(net, gain=0.02):
    """Initialize weights from a normal distribution as in pix2pix.

    Parameters
    ----------
    net : torch.nn.Module
        Network.

    gain : float, optional (default: 0.02)
        Standard deviation of convolution and linear weights.
    """
    def init_module(module):
        if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
            nn.init.normal_(module.weight, 0.0, gain)
            if module.bias is not None:
                nn.init.zeros_(module.bias)
        elif isinstance(module, nn.BatchNorm2d):
            nn.init.normal_(module.weight, 1.0, gain)
            nn.init.zeros_(module.bias)
    net.apply(init_module)


def _down(in_channels, out_channels, normalize=True):
    layers = [nn.Conv2d(in_channels, out_channels, 4, stride=2, padding=1,
                        bias=not normalize)]
    if normalize:
        layers.append(nn.BatchNorm2d(out_channels))
    layers.append(nn.LeakyReLU(0.2))
    return nn.Sequential(*layers)


def _up(in_channels, out_channels):
    return nn.Sequential(
        nn.ConvTranspose2d(in_channels, out_channels, 4, stride=2, padding=1,
                           bias=False),
        nn.BatchNorm2d(out_channels),
        nn.ReLU())


class UNetGenerator(nn.Module):
    """U-Net generator with an optional shear-conditioned bottleneck.

    Without shear input this is the pix2pix generator. With shear input,
    the flattened bottleneck is concatenated with the shear vector and
    passed through a fully connected layer with ReLU activation before it
    is reshaped and decoded.

    Parameters
    ----------
    image_size : int
        Height and width of input images.

    channels : tuple of int
        Channels of the encoder stages. Each stage halves the resolution.

    shear_dim : int, optional (default: 0)
        Number of shear components, 0 disables conditioning.

    fc_width : int, optional (default: size of the flattened bottleneck)
        Width of the bottleneck layer.
    """
    def __init__(self, image_size, channels, shear_dim=0, fc_width=None):
        super(UNetGenerator, self).__init__()
        n_stages = len(channels)
        if n_stages < 2 or image_size % 2 ** n_stages != 0:
            raise ConfigurationError(
                "Image size %d is not divisible by 2^%d"
                % (image_size, n_stages))
        self.shear_dim = shear_dim
        bottleneck_size = image_size // 2 ** n_stages
        self.bottleneck_shape = (channels[-1], bottleneck_size,
                                 bottleneck_size)
        flat_width = channels[-1] * bottleneck_size ** 2

        self.encoder = nn.ModuleList()
        in_channels = 1
        for i, out_channels in enumerate(channels):
            # no normalization of the raw input and of the innermost stage
            normalize = 0 < i < n_stages - 1
            self.encoder.append(_down(in_channels, out_channels, normalize))
            in_channels = out_channels

        if shear_dim > 0:
            if fc_width is None:
                fc_width = flat_width
            layers = [nn.Linear(flat_width + shear_dim, fc_width), nn.ReLU()]
            if fc_width != flat_width:
                layers.extend([nn.Linear(fc_width, flat_width), nn.ReLU()])
            self.bottleneck = nn.Sequential(*layers)
        else:
            self.bottleneck = None

        self.decoder = nn.ModuleList()
        in_channels = channels[-1]
        for i in range(n_stages - 1, 0, -1):
            self.decoder.append(_up(in_channels, channels[i - 1]))
            in_channels = 2 * channels[i - 1]
        self.output = nn.ConvTranspose2d(in_channels, 1, 4, stride=2,
                                         padding=1)

    def forward(self, sim, shear=None):
        """Translate a batch of simulated images.

        Parameters
        ----------
        sim : tensor, shape (n_images, 1, H, W)
            Simulated images.

        shear : tensor, shape (n_images, shear_dim), optional
            Scaled shear vectors, required iff the generator is conditioned.

        Returns
        -------
        generated : tensor, shape (n_images, 1, H, W)
            Generated images in [0, 1].
        """
        if self.shear_dim > 0 and shear is None:
            raise ConfigurationError(
                "Shear-conditioned generator requires a shear vector")
        if self.shear_dim == 0 and shear is not None:
            raise ConfigurationError(
                "Unconditioned generator does not accept a shear vector")

        skips = []
        x = sim
        for stage in self.encoder:
            x = stage(x)
            skips.append(x)

        if self.bottleneck is not None:
            x = torch.cat((torch.flatten(x, 1), shear), dim=1)
            x = self.bottleneck(x).view(-1, *self.bottleneck_shape)

        for stage, skip in zip(self.decoder, reversed(skips[:-1])):
            x = torch.cat((stage(x), skip), dim=1)
        return torch.sigmoid(self.output(x))


class PatchDiscriminator(nn.Module):
    """Convolutional patch discriminator conditioned on the simulated image.

    Parameters
    ----------
    channels : tuple of int
        Channels of the stride-2 stages.
    """
    def __init__(self, channels):
        super(PatchDiscriminator, self).__init__()
        stages = []
        in_channels = 2
        for i, out_channels in enumerate(channels):
            conv = nn.Conv2d(in_channels, out_channels, 3, stride=2,
                             padding=1, bias=i == 0)
            stages.append(conv)
            if i > 0:
                stages.append(nn.BatchNorm2d(out_channels))
            stages.append(nn.LeakyReLU(0.2))
            in_channels = out_channels
        stages.append(nn.Conv2d(in_channels, 1, 3, padding=1))
        self.net = nn.Sequential(*stages)
        self.n_stages = len(channels)

    def forward(self, sim, candidate):
        """Score a batch of (simulated, candidate real) image pairs.

        Parameters
        ----------
        sim : tensor, shape (n_images, 1, H, W)
            Simulated images.

        candidate : tensor, shape (n_images, 1, H, W)
            Real or generated images.

        Returns
        -------
        scores : tensor, shape (n_images, 1, H / 2^n_stages, W / 2^n_stages)
            Realness per patch.
        """
        if sim.shape != candidate.shape:
            raise ValueError("Image pair differs in shape: %s and %s"
                             % (tuple(sim.shape), tuple(candidate.shape)))
        return self.net(torch.cat((sim, candidate), dim=1))
