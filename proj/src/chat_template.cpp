#include "apf/chat_template.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "apf/errors.hpp"
#include "apf/text.hpp"

namespace apf {

namespace {

std::string unescape(const std::string& value) {
    std::string out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (value[i] == '\\' && i + 1 < value.size()) {
            char next = value[++i];
            switch (next) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 's': out.push_back(' '); break;  // preserves edge spaces
                case '\\': out.push_back('\\'); break;
                default:
                    out.push_back('\\');
                    out.push_back(next);
            }
        } else {
            out.push_back(value[i]);
        }
    }
    return out;
}

std::string escape(const std::string& value) {
    std::string out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        char c = value[i];
        if (c == '\n') {
            out += "\\n";
        } else if (c == '\t') {
            out += "\\t";
        } else if (c == '\\') {
            out += "\\\\";
        } else if (c == ' ' && (i == 0 || i + 1 == value.size())) {
            out += "\\s";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

ChatTemplate ChatTemplate::builtin(const std::string& name) {
    ChatTemplate t;
    t.name = name;
    if (name == "llama2-inst") {
        t.bos = "<s>";
        t.system_prefix = "<<SYS>>\n";
        t.system_suffix = "\n<</SYS>>\n\n";
        t.user_prefix = "[INST] ";
        t.user_suffix = " [/INST]";
        t.assistant_prefix = " ";
        t.assistant_suffix = " </s><s>";
        t.assistant_open = " ";
        t.prefill_sep = "";
    } else if (name == "chatml") {
        t.system_prefix = "<|im_start|>system\n";
        t.system_suffix = "<|im_end|>\n";
        t.user_prefix = "<|im_start|>user\n";
        t.user_suffix = "<|im_end|>\n";
        t.assistant_prefix = "<|im_start|>assistant\n";
        t.assistant_suffix = "<|im_end|>\n";
        t.assistant_open = "<|im_start|>assistant\n";
        t.prefill_sep = "";
    } else if (name == "vicuna-v1.5") {
        t.system_suffix = "\n\n";
        t.user_prefix = "USER: ";
        t.user_suffix = "\n";
        t.assistant_prefix = "ASSISTANT: ";
        t.assistant_suffix = "</s>\n";
        t.assistant_open = "ASSISTANT:";
        t.prefill_sep = " ";
    } else if (name == "generic") {
        t.system_prefix = "SYSTEM: ";
        t.system_suffix = "\n";
        t.user_prefix = "USER: ";
        t.user_suffix = "\n";
        t.assistant_prefix = "ASSISTANT: ";
        t.assistant_suffix = "\n";
        t.assistant_open = "ASSISTANT:";
        t.prefill_sep = " ";
    } else {
        throw ConfigError("unknown builtin chat template: " + name);
    }
    return t;
}

ChatTemplate ChatTemplate::parse(const std::string& name, const std::string& body) {
    ChatTemplate t;
    t.name = name;
    std::map<std::string, std::string*> fields = {
        {"bos", &t.bos},
        {"system_prefix", &t.system_prefix},
        {"system_suffix", &t.system_suffix},
        {"user_prefix", &t.user_prefix},
        {"user_suffix", &t.user_suffix},
        {"assistant_prefix", &t.assistant_prefix},
        {"assistant_suffix", &t.assistant_suffix},
        {"assistant_open", &t.assistant_open},
        {"prefill_sep", &t.prefill_sep},
    };
    std::istringstream in(body);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("template " + name + ": malformed line " +
                              std::to_string(line_no));
        }
        std::string key = text::trim(line.substr(0, eq));
        if (key == "name") {
            t.name = text::trim(line.substr(eq + 1));
            continue;
        }
        auto it = fields.find(key);
        if (it == fields.end()) {
            throw ConfigError("template " + name + ": unknown key '" + key + "'");
        }
        std::string value = line.substr(eq + 1);
        if (!value.empty() && value.front() == ' ') value.erase(0, 1);
        *it->second = unescape(value);
    }
    return t;
}

ChatTemplate ChatTemplate::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open chat template: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(path, buffer.str());
}

std::string ChatTemplate::to_asset_text() const {
    std::ostringstream out;
    out << "name = " << name << "\n";
    out << "bos = " << escape(bos) << "\n";
    out << "system_prefix = " << escape(system_prefix) << "\n";
    out << "system_suffix = " << escape(system_suffix) << "\n";
    out << "user_prefix = " << escape(user_prefix) << "\n";
    out << "user_suffix = " << escape(user_suffix) << "\n";
    out << "assistant_prefix = " << escape(assistant_prefix) << "\n";
    out << "assistant_suffix = " << escape(assistant_suffix) << "\n";
    out << "assistant_open = " << escape(assistant_open) << "\n";
    out << "prefill_sep = " << escape(prefill_sep) << "\n";
    return out.str();
}

std::string render(const ChatTemplate& tmpl, const ChatTranscript& transcript) {
    if (auto why = transcript.violation()) {
        throw Error("cannot render transcript: " + *why);
    }
    std::string out = tmpl.bos;
    if (transcript.system) {
        out += tmpl.system_prefix;
        out += *transcript.system;
        out += tmpl.system_suffix;
    }
    for (const Turn& turn : transcript.turns) {
        if (turn.role == Role::User) {
            out += tmpl.user_prefix;
            out += turn.text;
            out += tmpl.user_suffix;
        } else {
            out += tmpl.assistant_prefix;
            out += turn.text;
            out += tmpl.assistant_suffix;
        }
    }
    out += tmpl.assistant_open;
    if (transcript.assistant_prefill) {
        out += tmpl.prefill_sep;
        out += *transcript.assistant_prefill;
    }
    return out;
}

}  // namespace apf
