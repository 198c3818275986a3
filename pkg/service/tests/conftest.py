from __future__ import annotations

import pytest
import torch
from tokenizers import ByteLevelBPETokenizer
from tokenizers.processors import RobertaProcessing
from transformers import PreTrainedTokenizerFast, RobertaConfig, RobertaModel

TRAIN_CORPUS = [
    "i want to have a sandwich",
    "i vant to havea sand wich",
    "thank you lord",
    "thank you thank thank thank lord",
    "smoking something",
    "hello world this is a test",
    "the quick brown fox jumps over the lazy dog",
    "speech recognition evaluation metric",
]


@pytest.fixture(scope="session")
def mini_model_dir(tmp_path_factory):
    """A local roberta-architecture model with the real hidden size (768).

    Built offline with seeded weights and a byte-level BPE trained on a tiny
    corpus, so the full serving path (tokenizer offsets, special-token
    stripping, encoder inference) runs without network access.
    """
    directory = tmp_path_factory.mktemp("mini-roberta")

    bpe = ByteLevelBPETokenizer()
    bpe.train_from_iterator(
        TRAIN_CORPUS,
        vocab_size=500,
        min_frequency=1,
        special_tokens=["<s>", "<pad>", "</s>", "<unk>", "<mask>"],
    )
    bpe._tokenizer.post_processor = RobertaProcessing(
        sep=("</s>", bpe.token_to_id("</s>")),
        cls=("<s>", bpe.token_to_id("<s>")),
    )
    bpe.save(str(directory / "bpe.json"))
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_file=str(directory / "bpe.json"),
        bos_token="<s>",
        eos_token="</s>",
        unk_token="<unk>",
        pad_token="<pad>",
        mask_token="<mask>",
        cls_token="<s>",
        sep_token="</s>",
    )
    tokenizer.save_pretrained(directory)

    config = RobertaConfig(
        vocab_size=bpe.get_vocab_size(),
        hidden_size=768,
        num_hidden_layers=1,
        num_attention_heads=4,
        intermediate_size=256,
        max_position_embeddings=64,
    )
    torch.manual_seed(42)
    model = RobertaModel(config)
    model.eval()
    model.save_pretrained(directory)
    return str(directory)
