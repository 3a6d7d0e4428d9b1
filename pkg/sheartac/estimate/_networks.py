import torch
from torch import nn
from torch.nn import functional as F

from ..errors import ConfigurationError


VARIANCE_FLOOR = 1e-6


class GaussianDensityNetwork(nn.Module):
    """Convolutional network that predicts a Gaussian per label component.

    Parameters
    ----------
    image_size : int
        Height and width of input images.

    channels : tuple of int
        Channels of the stride-2 convolution stages.

    hidden_width : int
        Width of the hidden fully connected layer.

    label_dim : int
        Number of predicted components.
    """
    def __init__(self, image_size, channels, hidden_width, label_dim):
        super(GaussianDensityNetwork, self).__init__()
        if image_size % 2 ** len(channels) != 0:
            raise ConfigurationError(
                "Image size %d is not divisible by 2^%d"
                % (image_size, len(channels)))
        layers = []
        in_channels = 1
        for out_channels in channels:
            layers.extend([
                nn.Conv2d(in_channels, out_channels, 3, stride=2, padding=1),
                nn.ReLU()])
            in_channels = out_channels
        self.trunk = nn.Sequential(*layers)
        flat_width = channels[-1] * (image_size // 2 ** len(channels)) ** 2
        self.hidden = nn.Sequential(nn.Linear(flat_width, hidden_width),
                                    nn.ReLU())
        self.mean_head = nn.Linear(hidden_width, label_dim)
        self.variance_head = nn.Linear(hidden_width, label_dim)

    def forward(self, images):
        """Predict means and variances.

        Parameters
        ----------
        images : tensor, shape (n_images, 1, H, W)
            Tactile images.

        Returns
        -------
        mean : tensor, shape (n_images, label_dim)
            Means.

        variance : tensor, shape (n_images, label_dim)
            Variances, at least VARIANCE_FLOOR.
        """
        x = self.hidden(torch.flatten(self.trunk(images), 1))
        variance = F.softplus(self.variance_head(x)) + VARIANCE_FLOOR
        return self.mean_head(x), variance
